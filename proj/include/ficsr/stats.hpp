#pragma once

#include <cstddef>
#include <vector>

namespace ficsr {

// Per-fragment accuracies with their summary, matching the mu / sigma^2 /
// delta-percent table columns. Both variance conventions are reported.
struct FragmentReport {
    std::vector<double> per_fragment_accuracy;
    double mean_mu = 0.0;
    double var_population = 0.0;
    double var_sample = 0.0;   // divides by n-1; 0 for a single value
    double baseline_accuracy = 0.0;
    double delta_percent = 0.0;  // 100 * (mu - baseline) / baseline
};

FragmentReport summarize(const std::vector<double>& accuracies, double baseline);

struct WilcoxonResult {
    double statistic_w = 0.0;  // min(W+, W-)
    double p_value = 1.0;      // two-sided
    bool significant_at_5pct = false;
    std::size_t n_used = 0;    // pairs left after discarding zero differences
};

// Two-sided Wilcoxon signed-rank test. Zero differences are discarded,
// tied |differences| get average ranks. Exact p by enumeration for
// n <= 12, normal approximation with continuity correction otherwise.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ficsr
