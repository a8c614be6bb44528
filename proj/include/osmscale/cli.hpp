#pragma once

#include "osmscale/timestamp.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace osmscale::cli {

enum class Command { extract, fit, htb, network, snapshots, countries };
enum class Metric { users, edits, size, contributions, degree };

inline constexpr int exit_ok = 0;
inline constexpr int exit_input_error = 1;
inline constexpr int exit_config_error = 2;

struct RunConfig
{
    Command command = Command::extract;
    std::string input_path;
    std::string output_dir = ".";
    std::uint64_t seed = 0;
    std::size_t n_synth = 1000;
    double htb_threshold = 0.40;
    std::optional<Timestamp> cutoff;
    std::vector<int> years;
    std::optional<std::size_t> levels;
    std::optional<std::string> boundaries_path;
    Metric metric = Metric::size;
    //! 0 = hardware concurrency; never changes the output bytes
    unsigned threads = 0;
};

struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

//! Throws ConfigError.
void validate(const RunConfig& config);

/// Parses argv (including the program name). On failure returns the exit
/// code to use and writes the diagnostic to `err`.
struct ParseOutcome
{
    std::optional<RunConfig> config;
    int exit_code = exit_ok;
};
ParseOutcome parse_arguments(int argc, const char* const* argv, std::ostream& out,
                             std::ostream& err);

/// Executes one command, writing reports and manifest.tsv into
/// config.output_dir. Returns the process exit code.
int run(const RunConfig& config, std::ostream& err);

int main(int argc, const char* const* argv);

} // namespace osmscale::cli
