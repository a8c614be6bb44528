#include "osmscale/scaling_stats.hpp"
#include "osmscale/errors.hpp"
#include "osmscale/tsv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

namespace osmscale {

namespace {

void require_positive(std::span<const double> data)
{
    for (const double x : data) {
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::domain_error("power-law data must be finite and positive");
    }
}

// g(x) given ln(x / xmin)
inline double tail_cdf(double log_ratio, double alpha)
{
    return 1.0 - std::exp((1.0 - alpha) * log_ratio);
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline double unit_interval(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Shared scan over sorted data: candidates in ascending order, strict
// improvement only, so equal D keeps the smaller xmin.
XminSelection scan_xmin(const std::vector<double>& sorted)
{
    const std::size_t n = sorted.size();
    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i)
        logs[i] = std::log(sorted[i]);

    std::vector<long double> suffix(n + 1, 0.0L);
    for (std::size_t i = n; i-- > 0;)
        suffix[i] = suffix[i + 1] + logs[i];

    XminSelection best;
    double best_d = std::numeric_limits<double>::infinity();
    bool found = false;
    std::size_t witness = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1])
            continue;
        const std::size_t n_tail = n - i;
        // D >= 1/n_tail at x = xmin, and tails only shrink from here on.
        if (found && 1.0 / static_cast<double>(n_tail) >= best_d)
            break;
        if (sorted[n - 1] == sorted[i])
            break; // every remaining candidate is degenerate

        const long double log_sum =
            suffix[i] - static_cast<long double>(n_tail) * static_cast<long double>(logs[i]);
        if (!(log_sum > 0.0L))
            continue;
        const double alpha = 1.0 + static_cast<double>(static_cast<long double>(n_tail) / log_sum);

        const double inv_n = 1.0 / static_cast<double>(n_tail);
        auto deviation = [&](std::size_t j) {
            const double g = tail_cdf(logs[j] - logs[i], alpha);
            const double k = static_cast<double>(j - i);
            return std::max(std::fabs((k + 1.0) * inv_n - g), std::fabs(k * inv_n - g));
        };
        // the point that decided the previous candidate usually decides this one
        if (witness > i && deviation(witness) >= best_d)
            continue;
        double d = 0.0;
        std::size_t argmax = i;
        for (std::size_t j = i; j < n && d < best_d; ++j) {
            const double dj = deviation(j);
            if (dj > d) {
                d = dj;
                argmax = j;
            }
        }
        witness = argmax;
        if (d >= best_d)
            continue;
        best = XminSelection{sorted[i], alpha, d, n_tail};
        best_d = d;
        found = true;
    }
    if (!found)
        throw InsufficientData("no xmin candidate leaves two tail values with a non-degenerate fit");
    return best;
}

} // namespace

double power_law_quantile(double u, double alpha, double xmin)
{
    return xmin * std::pow(1.0 - u, -1.0 / (alpha - 1.0));
}

double mle_alpha(std::span<const double> data, double xmin)
{
    if (!(xmin > 0.0))
        throw std::domain_error("xmin must be positive");
    std::size_t n = 0;
    long double log_sum = 0.0L;
    for (const double x : data) {
        if (x >= xmin) {
            ++n;
            log_sum += std::log(x / xmin);
        }
    }
    if (n < 2)
        throw InsufficientData("fewer than two values at or above xmin");
    if (!(log_sum > 0.0L))
        throw DegenerateTail("all tail values equal xmin");
    return 1.0 + static_cast<double>(static_cast<long double>(n) / log_sum);
}

double ks_distance(std::span<const double> data, double alpha, double xmin)
{
    std::vector<double> tail;
    for (const double x : data) {
        if (x >= xmin)
            tail.push_back(x);
    }
    if (tail.empty())
        throw InsufficientData("no values at or above xmin");
    std::sort(tail.begin(), tail.end());

    const double n = static_cast<double>(tail.size());
    double d = 0.0;
    for (std::size_t i = 0; i < tail.size(); ++i) {
        const double g = tail_cdf(std::log(tail[i] / xmin), alpha);
        const double k = static_cast<double>(i);
        d = std::max({d, std::fabs((k + 1.0) / n - g), std::fabs(k / n - g)});
    }
    return d;
}

XminSelection select_xmin(std::span<const double> data)
{
    require_positive(data);
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.size() < 2 || sorted.front() == sorted.back())
        throw InsufficientData("need at least two distinct values");
    return scan_xmin(sorted);
}

double bootstrap_p(std::span<const double> data, const XminSelection& fit, std::size_t n_synth,
                   std::uint64_t seed, unsigned threads)
{
    if (n_synth == 0)
        throw std::invalid_argument("n_synth must be at least 1");
    const std::size_t n = data.size();
    std::vector<double> body;
    for (const double x : data) {
        if (x < fit.xmin)
            body.push_back(x);
    }
    const double p_tail = static_cast<double>(fit.n_tail) / static_cast<double>(n);

    std::vector<char> exceeds(n_synth, 0);
    auto replicate = [&](std::size_t r) {
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(r)));
        std::vector<double> synth(n);
        for (double& x : synth) {
            if (body.empty() || unit_interval(rng) < p_tail) {
                x = power_law_quantile(unit_interval(rng), fit.alpha, fit.xmin);
            } else {
                auto idx = static_cast<std::size_t>(unit_interval(rng) * static_cast<double>(body.size()));
                x = body[std::min(idx, body.size() - 1)];
            }
        }
        std::sort(synth.begin(), synth.end());
        double d_synth;
        if (synth.size() < 2 || synth.front() == synth.back()) {
            d_synth = std::numeric_limits<double>::infinity();
        } else {
            try {
                d_synth = scan_xmin(synth).ks_distance;
            } catch (const InsufficientData&) {
                d_synth = std::numeric_limits<double>::infinity();
            }
        }
        exceeds[r] = d_synth > fit.ks_distance ? 1 : 0;
    };

    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_synth));
    if (workers <= 1) {
        for (std::size_t r = 0; r < n_synth; ++r)
            replicate(r);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t r = t; r < n_synth; r += workers)
                    replicate(r);
            });
        }
    }

    std::size_t count = 0;
    for (const char e : exceeds)
        count += static_cast<std::size_t>(e);
    return static_cast<double>(count) / static_cast<double>(n_synth);
}

PowerLawFit fit_power_law(std::span<const double> data, std::size_t n_synth, std::uint64_t seed,
                          unsigned threads)
{
    const XminSelection sel = select_xmin(data);
    PowerLawFit fit;
    fit.alpha = sel.alpha;
    fit.xmin = sel.xmin;
    fit.n_tail = sel.n_tail;
    fit.ks_distance = sel.ks_distance;
    fit.norm_k = (sel.alpha - 1.0) / sel.xmin;
    fit.p = bootstrap_p(data, sel, n_synth, seed, threads);
    fit.alpha_accepted = fit.alpha > alpha_lower_bound && fit.alpha < alpha_upper_bound;
    fit.p_accepted = fit.p >= p_threshold;
    return fit;
}

LineFit loglog_slope(std::span<const Point> points)
{
    if (points.size() < 2)
        throw InsufficientData("need at least two points");
    long double sx = 0, sy = 0;
    for (const Point& p : points) {
        if (!(p.x > 0.0) || !(p.y > 0.0))
            throw std::domain_error("log-log fit needs positive coordinates");
        sx += std::log(p.x);
        sy += std::log(p.y);
    }
    const long double n = static_cast<long double>(points.size());
    const long double mx = sx / n;
    const long double my = sy / n;
    long double sxx = 0, sxy = 0;
    for (const Point& p : points) {
        const long double dx = std::log(p.x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(p.y) - my);
    }
    if (sxx == 0)
        throw InsufficientData("x values must not all be equal");
    const long double slope = sxy / sxx;
    return LineFit{static_cast<double>(slope), static_cast<double>(my - slope * mx)};
}

namespace {

void check_threshold(double threshold)
{
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("head/tail threshold must lie in (0, 1)");
}

// Runs the recursion; `on_head` sees each recorded head in order.
template <typename OnHead>
std::vector<HtbLevel> run_breaks(std::span<const double> data, double threshold, std::size_t max_levels,
                                 OnHead&& on_head)
{
    std::vector<HtbLevel> levels;
    std::vector<double> current(data.begin(), data.end());
    while (levels.size() < max_levels) {
        long double sum = 0.0L;
        for (const double x : current)
            sum += x;
        const double mean = static_cast<double>(sum / static_cast<long double>(current.size()));

        std::vector<double> head;
        for (const double x : current) {
            if (x > mean)
                head.push_back(x);
        }
        if (head.empty())
            break;
        const double n_sum = static_cast<double>(current.size());
        const double pct_head = static_cast<double>(head.size()) / n_sum;
        if (pct_head > threshold)
            break;

        HtbLevel level;
        level.n_sum = current.size();
        level.n_head = head.size();
        level.n_tail = current.size() - head.size();
        level.pct_head = pct_head;
        level.pct_tail = static_cast<double>(level.n_tail) / n_sum;
        level.mean = mean;
        levels.push_back(level);
        on_head(head);

        if (head.size() <= 1)
            break;
        current = std::move(head);
    }
    return levels;
}

} // namespace

HtbResult head_tail_breaks(std::span<const double> data, double threshold)
{
    check_threshold(threshold);
    if (data.empty())
        throw EmptyInput("head/tail breaks needs at least one value");
    HtbResult result;
    result.levels = run_breaks(data, threshold, std::numeric_limits<std::size_t>::max(),
                               [](const std::vector<double>&) {});
    result.ht_index = static_cast<int>(result.levels.size()) + 1;
    return result;
}

int ht_index(const HtbResult& result)
{
    return static_cast<int>(result.levels.size()) + 1;
}

std::vector<double> top_hierarchy_filter(std::span<const double> data, std::size_t levels,
                                         double threshold)
{
    check_threshold(threshold);
    if (levels == 0 || data.empty())
        return std::vector<double>(data.begin(), data.end());
    std::vector<double> last_head;
    run_breaks(data, threshold, levels,
               [&](const std::vector<double>& head) { last_head = head; });
    return last_head;
}

void write_htb_report(std::ostream& out, const HtbResult& result)
{
    out << "#sum\t#head\t%head\t#tail\t%tail\tmean\n";
    for (const HtbLevel& l : result.levels) {
        out << l.n_sum << '\t' << l.n_head << '\t' << format_percent(l.pct_head) << '\t' << l.n_tail
            << '\t' << format_percent(l.pct_tail) << '\t' << format_double(l.mean) << '\n';
    }
    out << "ht_index\t" << result.ht_index << '\n';
}

void write_fit_report(std::ostream& out, const PowerLawFit& fit)
{
    out << "alpha\txmin\tn_tail\tD\tp\talpha_accepted\tp_accepted\n";
    out << format_double(fit.alpha) << '\t' << format_double(fit.xmin) << '\t' << fit.n_tail << '\t'
        << format_double(fit.ks_distance) << '\t' << format_double(fit.p) << '\t'
        << (fit.alpha_accepted ? "true" : "false") << '\t' << (fit.p_accepted ? "true" : "false")
        << '\n';
}

} // namespace osmscale
