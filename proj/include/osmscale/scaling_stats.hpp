#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace osmscale {

inline constexpr double alpha_lower_bound = 1.0; // exclusive
inline constexpr double alpha_upper_bound = 3.0; // exclusive
inline constexpr double p_threshold = 0.05;
inline constexpr double default_htb_threshold = 0.40;
inline constexpr std::size_t default_n_synth = 1000;

// ---------------------------------------------------------------------------
// Power-law detection (continuous MLE + KS distance + bootstrap p).
//
// Tail model for x >= xmin: density ((alpha - 1)/xmin) (x/xmin)^-alpha,
// CDF g(x) = 1 - (x/xmin)^(1-alpha).
// ---------------------------------------------------------------------------

struct XminSelection
{
    double xmin = 0.0;
    double alpha = 0.0;
    double ks_distance = 0.0;
    std::size_t n_tail = 0;
};

struct PowerLawFit
{
    double alpha = 0.0;
    double xmin = 0.0;
    std::size_t n_tail = 0;
    double ks_distance = 0.0;
    double p = 0.0;
    //! (alpha - 1) / xmin: scale of the tail density p(x) = norm_k (x/xmin)^-alpha.
    //! Derived from the fit, not estimated separately.
    double norm_k = 0.0;
    bool alpha_accepted = false;
    bool p_accepted = false;
};

//! alpha = 1 + n / sum(ln(x_i / xmin)) over the n values >= xmin.
//! Throws InsufficientData (fewer than 2 tail values) or DegenerateTail.
double mle_alpha(std::span<const double> data, double xmin);

//! Exact KS distance between the tail ECDF (both step conventions) and g.
double ks_distance(std::span<const double> data, double alpha, double xmin);

//! Scans distinct data values as xmin candidates, minimising D; ties go
//! to the smaller xmin. Throws InsufficientData when no candidate keeps
//! two tail values with a non-zero log sum.
XminSelection select_xmin(std::span<const double> data);

//! Semi-parametric bootstrap: each synthetic value comes from the fitted
//! tail with probability n_tail/n, otherwise from the empirical values
//! below xmin. Every synthetic set is refitted with select_xmin and
//! p = #{D_i > D} / n_synth. Replicate streams are derived from (seed, i),
//! so the result does not depend on `threads`; 0 picks hardware concurrency.
double bootstrap_p(std::span<const double> data, const XminSelection& fit, std::size_t n_synth,
                   std::uint64_t seed, unsigned threads = 0);

PowerLawFit fit_power_law(std::span<const double> data, std::size_t n_synth = default_n_synth,
                          std::uint64_t seed = 0, unsigned threads = 0);

//! Inverse-transform draw x = xmin * (1 - u)^(-1/(alpha - 1)).
double power_law_quantile(double u, double alpha, double xmin);

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

struct LineFit
{
    double slope = 0.0;
    double intercept = 0.0;
};

//! Ordinary least squares on (ln x, ln y). Baseline only; the MLE above is
//! the estimator of record.
LineFit loglog_slope(std::span<const Point> points);

// ---------------------------------------------------------------------------
// Head/tail breaks
// ---------------------------------------------------------------------------

struct HtbLevel
{
    std::size_t n_sum = 0;
    std::size_t n_head = 0;
    double pct_head = 0.0; // fractions, not percent
    std::size_t n_tail = 0;
    double pct_tail = 0.0;
    double mean = 0.0;

    friend bool operator==(const HtbLevel&, const HtbLevel&) = default;
};

struct HtbResult
{
    std::vector<HtbLevel> levels; // source level first
    int ht_index = 1;
};

/// Recursively splits around the arithmetic mean. Head = values strictly
/// above the mean. A split is recorded only if the head is non-empty and
/// its share is <= threshold; recursion continues on a recorded head with
/// more than one value. Throws EmptyInput.
HtbResult head_tail_breaks(std::span<const double> data,
                           double threshold = default_htb_threshold);

int ht_index(const HtbResult& result);

/// Head values after `levels` recorded splits, in input order. Stops early
/// at the last recorded head; if not even one split is recorded the result
/// is empty. levels == 0 returns the input.
std::vector<double> top_hierarchy_filter(std::span<const double> data, std::size_t levels,
                                         double threshold = default_htb_threshold);

//! #sum #head %head #tail %tail mean rows, then "ht_index <n>".
void write_htb_report(std::ostream& out, const HtbResult& result);
//! alpha xmin n_tail D p alpha_accepted p_accepted
void write_fit_report(std::ostream& out, const PowerLawFit& fit);

} // namespace osmscale
