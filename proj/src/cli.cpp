#include "osmscale/cli.hpp"
#include "osmscale/cocontribution_network.hpp"
#include "osmscale/element_metrics.hpp"
#include "osmscale/errors.hpp"
#include "osmscale/history_parser.hpp"
#include "osmscale/scaling_stats.hpp"
#include "osmscale/spatial_aggregation.hpp"
#include "osmscale/tsv.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace osmscale::cli {

namespace fs = std::filesystem;

namespace {

struct InputError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

const std::map<std::string, Command>& command_names()
{
    static const std::map<std::string, Command> names{
        {"extract", Command::extract}, {"fit", Command::fit},
        {"htb", Command::htb},         {"network", Command::network},
        {"snapshots", Command::snapshots}, {"countries", Command::countries}};
    return names;
}

const std::map<std::string, Metric>& metric_names()
{
    static const std::map<std::string, Metric> names{{"users", Metric::users},
                                                     {"edits", Metric::edits},
                                                     {"size", Metric::size},
                                                     {"contributions", Metric::contributions},
                                                     {"degree", Metric::degree}};
    return names;
}

template <typename Enum>
std::string name_of(const std::map<std::string, Enum>& names, Enum value)
{
    for (const auto& [name, v] : names) {
        if (v == value)
            return name;
    }
    return "?";
}

std::vector<int> parse_years(const std::string& text)
{
    std::vector<int> years;
    std::stringstream ss(text);
    std::string item;
    auto to_int = [&text](std::string_view s) {
        int value = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
            throw ConfigError("invalid --years value '" + text + "'");
        return value;
    };
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        if (dash != std::string::npos && dash > 0) {
            const int from = to_int(std::string_view(item).substr(0, dash));
            const int to = to_int(std::string_view(item).substr(dash + 1));
            if (to < from)
                throw ConfigError("descending year range '" + item + "'");
            for (int y = from; y <= to; ++y)
                years.push_back(y);
        } else {
            years.push_back(to_int(item));
        }
    }
    return years;
}

std::string file_sha256(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static const char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InputError("cannot write " + path.string());
    body(out);
    out.flush();
    if (!out)
        throw InputError("failed writing " + path.string());
}

std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open input " + path);
    return in;
}

//! Extract reports start with a header row; history files with '<'.
bool is_tsv_input(const std::string& path)
{
    std::ifstream in = open_input(path);
    char c = 0;
    while (in.get(c)) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n')
            continue;
        return c != '<';
    }
    return false;
}

// Everything the commands need from one pass over the history stream.
struct Extraction
{
    std::vector<ElementSummary> summaries;
    UserContributionCounter users;
    GraphBuilder graph;
    SnapshotBuilder snapshots;
};

struct ExtractionNeeds
{
    bool summaries = false;
    bool users = false;
    bool graph = false;
    bool snapshots = false;
    std::optional<Timestamp> cutoff;
};

Extraction extract(const std::string& path, const ExtractionNeeds& needs)
{
    std::ifstream in = open_input(path);
    ElementHistoryReader reader(in);
    Extraction ex;
    while (auto history = reader.next()) {
        if (needs.summaries)
            ex.summaries.push_back(summarize_element(*history));
        if (needs.users)
            ex.users.add(*history);
        if (needs.graph)
            ex.graph.add(contributor_set(*history, needs.cutoff));
        if (needs.snapshots)
            ex.snapshots.add(*history);
    }
    return ex;
}

ElementStore build_resolved_store(std::vector<ElementSummary> summaries, SizeDiagnostics* diag)
{
    ElementStore store = ElementStore::build(std::move(summaries));
    const SizeDiagnostics d = store.resolve_sizes();
    if (diag != nullptr)
        *diag = d;
    return store;
}

std::vector<double> metric_from_tsv(const std::string& path, Metric metric)
{
    std::ifstream in = open_input(path);
    const TsvTable table = TsvTable::read(in);
    std::string column_name;
    switch (metric) {
    case Metric::users: column_name = "n_users"; break;
    case Metric::edits: column_name = "n_edits"; break;
    case Metric::size: column_name = "size"; break;
    case Metric::contributions: column_name = "n_elements"; break;
    case Metric::degree: column_name = "degree"; break;
    }
    const int col = table.column(column_name);
    if (col < 0)
        throw InputError(path + " has no '" + column_name + "' column");
    std::vector<double> values;
    values.reserve(table.rows().size());
    for (const auto& row : table.rows()) {
        const std::string& field = row[static_cast<std::size_t>(col)];
        if (field == "EXCLUDED")
            continue;
        double v = 0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || ptr != field.data() + field.size())
            throw InputError(path + ": non-numeric value '" + field + "' in " + column_name);
        values.push_back(v);
    }
    return values;
}

std::vector<double> metric_from_history(const RunConfig& config)
{
    ExtractionNeeds needs;
    needs.cutoff = config.cutoff;
    switch (config.metric) {
    case Metric::users:
    case Metric::edits:
    case Metric::size: needs.summaries = true; break;
    case Metric::contributions: needs.users = true; break;
    case Metric::degree: needs.graph = true; break;
    }
    Extraction ex = extract(config.input_path, needs);

    std::vector<double> values;
    switch (config.metric) {
    case Metric::users:
    case Metric::edits:
    case Metric::size: {
        const ElementStore store = build_resolved_store(std::move(ex.summaries), nullptr);
        for (const ElementSummary& s : store.summaries()) {
            if (config.metric == Metric::users)
                values.push_back(s.n_users);
            else if (config.metric == Metric::edits)
                values.push_back(s.n_edits);
            else if (!s.size->is_excluded())
                values.push_back(static_cast<double>(s.size->count()));
        }
        break;
    }
    case Metric::contributions:
        for (const auto& row : ex.users.table())
            values.push_back(static_cast<double>(row.n_elements));
        break;
    case Metric::degree:
        for (const std::size_t d : degree_sequence(ex.graph.build(config.cutoff)))
            values.push_back(static_cast<double>(d));
        break;
    }
    return values;
}

std::vector<double> metric_values(const RunConfig& config)
{
    if (is_tsv_input(config.input_path))
        return metric_from_tsv(config.input_path, config.metric);
    return metric_from_history(config);
}

using ManifestExtras = std::vector<std::pair<std::string, std::string>>;

void write_manifest(const RunConfig& config, const std::vector<std::string>& outputs,
                    const ManifestExtras& extras)
{
    write_file(fs::path(config.output_dir) / "manifest.tsv", [&](std::ostream& out) {
        auto row = [&out](const std::string& k, const std::string& v) { out << k << '\t' << v << '\n'; };
        out << "key\tvalue\n";
        row("tool", "osmscale");
        row("command", name_of(command_names(), config.command));
        row("input", config.input_path);
        row("input_sha256", file_sha256(config.input_path));
        row("seed", std::to_string(config.seed));
        row("n_synth", std::to_string(config.n_synth));
        row("htb_threshold", format_double(config.htb_threshold));
        row("cutoff", config.cutoff ? format_timestamp(*config.cutoff) : "NA");
        std::string years;
        for (const int y : config.years)
            years += (years.empty() ? "" : ",") + std::to_string(y);
        row("years", years.empty() ? "NA" : years);
        row("levels", config.levels ? std::to_string(*config.levels) : "NA");
        row("metric", name_of(metric_names(), config.metric));
        row("boundaries", config.boundaries_path.value_or("NA"));
        if (config.boundaries_path)
            row("boundaries_sha256", file_sha256(*config.boundaries_path));
        for (const auto& [k, v] : extras)
            row(k, v);
        std::string files;
        for (const auto& f : outputs)
            files += (files.empty() ? "" : ",") + f;
        row("outputs", files);
    });
}

int run_extract(const RunConfig& config)
{
    Extraction ex = extract(config.input_path, ExtractionNeeds{.summaries = true, .users = true, .graph = false, .snapshots = false, .cutoff = std::nullopt});
    SizeDiagnostics diag;
    const ElementStore store = build_resolved_store(std::move(ex.summaries), &diag);
    const fs::path dir(config.output_dir);
    write_file(dir / "elements.tsv", [&](std::ostream& out) { write_element_table(out, store.summaries()); });
    const auto users = ex.users.table();
    write_file(dir / "contributions.tsv", [&](std::ostream& out) { write_user_contributions(out, users); });
    write_manifest(config, {"elements.tsv", "contributions.tsv"},
                   {{"elements", std::to_string(store.size())},
                    {"users", std::to_string(users.size())},
                    {"excluded_relations", std::to_string(diag.excluded_relations)},
                    {"dangling_members", std::to_string(diag.dangling_members)}});
    return exit_ok;
}

int run_fit(const RunConfig& config)
{
    std::vector<double> values = metric_values(config);
    std::erase_if(values, [](double v) { return !(v > 0.0); });
    const std::size_t n_positive = values.size();
    if (config.levels)
        values = top_hierarchy_filter(values, *config.levels, config.htb_threshold);
    const PowerLawFit fit = fit_power_law(values, config.n_synth, config.seed, config.threads);
    write_file(fs::path(config.output_dir) / "fit.tsv", [&](std::ostream& out) { write_fit_report(out, fit); });
    write_manifest(config, {"fit.tsv"},
                   {{"n_values", std::to_string(n_positive)},
                    {"n_fitted", std::to_string(values.size())},
                    {"norm_k", format_double(fit.norm_k)}});
    return exit_ok;
}

int run_htb(const RunConfig& config)
{
    const std::vector<double> values = metric_values(config);
    const HtbResult result = head_tail_breaks(values, config.htb_threshold);
    write_file(fs::path(config.output_dir) / "htb.tsv", [&](std::ostream& out) { write_htb_report(out, result); });
    write_manifest(config, {"htb.tsv"}, {{"n_values", std::to_string(values.size())}});
    return exit_ok;
}

int run_network(const RunConfig& config)
{
    Extraction ex = extract(config.input_path, ExtractionNeeds{.summaries = false, .users = false, .graph = true, .snapshots = false, .cutoff = config.cutoff});
    const CoContributionGraph graph = ex.graph.build(config.cutoff);
    const fs::path dir(config.output_dir);
    std::vector<std::string> outputs{"edges.tsv", "degrees.tsv", "network_stats.tsv"};
    write_file(dir / "edges.tsv", [&](std::ostream& out) { write_edge_list(out, graph); });
    write_file(dir / "degrees.tsv", [&](std::ostream& out) { write_degree_list(out, graph); });
    const NetworkStats stats = network_stats(graph, config.n_synth, config.seed, config.htb_threshold);
    write_file(dir / "network_stats.tsv", [&](std::ostream& out) { write_network_stats(out, stats); });
    ManifestExtras extras;
    if (!graph.empty())
        extras.emplace_back("mean_degree", format_double(mean_degree(graph)));
    if (config.levels && !graph.empty()) {
        const auto top = filter_top_hierarchies(graph, *config.levels, config.htb_threshold);
        write_file(dir / "top_edges.tsv", [&](std::ostream& out) { write_edge_list(out, top); });
        outputs.emplace_back("top_edges.tsv");
        extras.emplace_back("top_nodes", std::to_string(top.node_count()));
        extras.emplace_back("top_edges", std::to_string(top.edge_count()));
    }
    write_manifest(config, outputs, extras);
    return exit_ok;
}

int run_snapshots(const RunConfig& config)
{
    Extraction ex = extract(config.input_path, ExtractionNeeds{.summaries = false, .users = false, .graph = false, .snapshots = true, .cutoff = std::nullopt});
    const auto rows = ex.snapshots.yearly_stats(config.years, config.n_synth, config.seed,
                                                config.htb_threshold);
    write_file(fs::path(config.output_dir) / "snapshots.tsv",
               [&](std::ostream& out) { write_yearly_stats(out, rows); });
    write_manifest(config, {"snapshots.tsv"}, {});
    return exit_ok;
}

int run_countries(const RunConfig& config)
{
    std::ifstream bin = open_input(*config.boundaries_path);
    const auto boundaries = read_boundaries(bin);
    Extraction ex = extract(config.input_path, ExtractionNeeds{.summaries = true, .users = false, .graph = false, .snapshots = false, .cutoff = std::nullopt});
    const ElementStore store = build_resolved_store(std::move(ex.summaries), nullptr);
    const CountryTable table = aggregate_by_country(store.summaries(), boundaries, store);
    write_file(fs::path(config.output_dir) / "countries.tsv",
               [&](std::ostream& out) { write_country_table(out, table); });
    write_manifest(config, {"countries.tsv"}, {{"countries", std::to_string(boundaries.size())}});
    return exit_ok;
}

} // namespace

void validate(const RunConfig& config)
{
    if (config.input_path.empty())
        throw ConfigError("--input is required");
    if (!(config.htb_threshold > 0.0 && config.htb_threshold < 1.0))
        throw ConfigError("--htb-threshold must lie in (0, 1)");
    if (config.n_synth < 1)
        throw ConfigError("--n-synth must be at least 1");
    if (config.command == Command::snapshots) {
        if (config.years.empty())
            throw ConfigError("snapshots needs --years");
        if (!std::is_sorted(config.years.begin(), config.years.end()))
            throw ConfigError("--years must be ascending");
    }
    if (config.command == Command::countries && !config.boundaries_path)
        throw ConfigError("countries needs --boundaries");
}

ParseOutcome parse_arguments(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Scaling analysis of OpenStreetMap full-history dumps", "osmscale"};
    RunConfig config;
    std::string command;
    std::string cutoff;
    std::string years;
    std::string metric = "size";
    std::size_t levels = 0;
    std::string boundaries;

    std::string command_list;
    for (const auto& [name, _] : command_names())
        command_list += (command_list.empty() ? "" : "|") + name;
    app.add_option("command", command, command_list)->required();
    app.add_option("--input", config.input_path, "OSM history XML (or an extract TSV for fit/htb)")
        ->required();
    app.add_option("--out", config.output_dir, "output directory")->capture_default_str();
    app.add_option("--seed", config.seed, "random seed")->capture_default_str();
    app.add_option("--n-synth", config.n_synth, "bootstrap replicates")->capture_default_str();
    app.add_option("--htb-threshold", config.htb_threshold, "head share limit")->capture_default_str();
    auto* cutoff_opt = app.add_option("--cutoff", cutoff, "UTC instant YYYY-MM-DDTHH:MM:SSZ");
    app.add_option("--years", years, "e.g. 2007,2008 or 2005-2013");
    auto* levels_opt = app.add_option("--levels", levels, "head/tail levels to keep");
    auto* boundaries_opt = app.add_option("--boundaries", boundaries, "country boundary file");
    app.add_option("--metric", metric, "users|edits|size|contributions|degree")->capture_default_str();
    app.add_option("--threads", config.threads, "worker threads, 0 = all cores")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return {std::nullopt, exit_ok};
    } catch (const CLI::ParseError& e) {
        err << "osmscale: " << e.what() << '\n';
        return {std::nullopt, exit_config_error};
    }

    try {
        const auto cmd = command_names().find(command);
        if (cmd == command_names().end())
            throw ConfigError("unknown command '" + command + "' (expected " + command_list + ")");
        config.command = cmd->second;
        const auto m = metric_names().find(metric);
        if (m == metric_names().end())
            throw ConfigError("unknown metric '" + metric + "'");
        config.metric = m->second;
        if (*cutoff_opt) {
            config.cutoff = parse_timestamp(cutoff);
            if (!config.cutoff)
                throw ConfigError("--cutoff must look like 2007-12-31T23:59:59Z");
        }
        if (!years.empty())
            config.years = parse_years(years);
        if (*levels_opt)
            config.levels = levels;
        if (*boundaries_opt)
            config.boundaries_path = boundaries;
        validate(config);
    } catch (const ConfigError& e) {
        err << "osmscale: " << e.what() << '\n';
        return {std::nullopt, exit_config_error};
    }
    return {config, exit_ok};
}

int run(const RunConfig& config, std::ostream& err)
{
    try {
        validate(config);
    } catch (const ConfigError& e) {
        err << "osmscale: " << e.what() << '\n';
        return exit_config_error;
    }
    try {
        if (!fs::exists(config.input_path))
            throw InputError("input file not found: " + config.input_path);
        if (config.boundaries_path && !fs::exists(*config.boundaries_path))
            throw InputError("boundary file not found: " + *config.boundaries_path);
        std::error_code ec;
        fs::create_directories(config.output_dir, ec);
        if (ec)
            throw InputError("cannot create output directory " + config.output_dir + ": " + ec.message());

        switch (config.command) {
        case Command::extract: return run_extract(config);
        case Command::fit: return run_fit(config);
        case Command::htb: return run_htb(config);
        case Command::network: return run_network(config);
        case Command::snapshots: return run_snapshots(config);
        case Command::countries: return run_countries(config);
        }
    } catch (const InputError& e) {
        err << "osmscale: " << e.what() << '\n';
    } catch (const Error& e) {
        err << "osmscale: " << config.input_path << ": " << e.what() << '\n';
    } catch (const std::domain_error& e) {
        err << "osmscale: " << e.what() << '\n';
    }
    return exit_input_error;
}

int main(int argc, const char* const* argv)
{
    const ParseOutcome parsed = parse_arguments(argc, argv, std::cout, std::cerr);
    if (!parsed.config)
        return parsed.exit_code;
    return run(*parsed.config, std::cerr);
}

} // namespace osmscale::cli
