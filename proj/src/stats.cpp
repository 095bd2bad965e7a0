#include "ficsr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace ficsr {

FragmentReport summarize(const std::vector<double>& accuracies, double baseline) {
    if (accuracies.empty()) throw std::invalid_argument("summarize: empty accuracy list");
    if (baseline <= 0.0) throw std::invalid_argument("summarize: baseline must be > 0");
    FragmentReport r;
    r.per_fragment_accuracy = accuracies;
    r.baseline_accuracy = baseline;
    const double n = static_cast<double>(accuracies.size());
    r.mean_mu = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / n;
    double ss = 0.0;
    for (double a : accuracies) ss += (a - r.mean_mu) * (a - r.mean_mu);
    r.var_population = ss / n;
    r.var_sample = accuracies.size() > 1 ? ss / (n - 1.0) : 0.0;
    r.delta_percent = 100.0 * (r.mean_mu - baseline) / baseline;
    return r;
}

namespace {

// Average ranks of |d|, ties averaged.
std::vector<double> tied_ranks(const std::vector<double>& absd) {
    const std::size_t n = absd.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t l, std::size_t r) { return absd[l] < absd[r]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && absd[order[j + 1]] == absd[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: length mismatch");
    std::vector<double> diffs;
    diffs.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    WilcoxonResult res;
    res.n_used = diffs.size();
    if (diffs.empty()) {
        res.p_value = 1.0;
        return res;
    }
    const std::size_t n = diffs.size();
    std::vector<double> absd(n);
    for (std::size_t i = 0; i < n; ++i) absd[i] = std::abs(diffs[i]);
    const std::vector<double> ranks = tied_ranks(absd);

    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (diffs[i] > 0.0) w_plus += ranks[i];
    }
    const double total = static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
    const double w_minus = total - w_plus;
    const double w = std::min(w_plus, w_minus);
    res.statistic_w = w;

    if (n <= 12) {
        // enumerate all sign assignments over the observed ranks
        const std::uint64_t count = std::uint64_t{1} << n;
        std::uint64_t at_or_below = 0;
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            double wp = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (std::uint64_t{1} << i)) wp += ranks[i];
            }
            if (wp <= w + 1e-12) ++at_or_below;
        }
        res.p_value = std::min(1.0, 2.0 * static_cast<double>(at_or_below) /
                                        static_cast<double>(count));
    } else {
        const double mean = total / 2.0;
        // tie correction on the variance
        double tie_term = 0.0;
        std::vector<double> sorted(absd);
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
        const double var = static_cast<double>(n) * static_cast<double>(n + 1) *
                               static_cast<double>(2 * n + 1) / 24.0 -
                           tie_term / 48.0;
        if (var <= 0.0) {
            res.p_value = 1.0;
        } else {
            const double z = (w - mean + 0.5) / std::sqrt(var);
            res.p_value = std::min(1.0, 2.0 * normal_cdf(z));
        }
    }
    res.significant_at_5pct = res.p_value < 0.05;
    return res;
}

}  // namespace ficsr
