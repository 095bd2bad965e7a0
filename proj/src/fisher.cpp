#include "ficsr/fisher.hpp"

#include <limits>
#include <stdexcept>

namespace ficsr {

ParamVector per_example_score(const MlpModel& model, const std::vector<double>& x, int y) {
    Matrix xm(1, x.size());
    std::copy(x.begin(), x.end(), xm.data.begin());
    ParamVector g = grad_loss(model, xm, std::vector<int>{y});
    for (double& v : g.values) v = -v;
    return g;
}

FisherDiagonal empirical_fisher_diag(const MlpModel& model, const Dataset& data) {
    const std::size_t n = data.size();
    if (n == 0) throw std::invalid_argument("empirical_fisher_diag: empty dataset");
    const std::size_t p = model.params.values.size();

    // Scores computed in parallel, reduced serially so the result does not
    // depend on thread count.
    Matrix scores(n, p);
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nn; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        std::vector<double> xi(data.features.row_ptr(ii), data.features.row_ptr(ii) + data.dim());
        ParamVector s = per_example_score(model, xi, data.labels[ii]);
        std::copy(s.values.begin(), s.values.end(), scores.row_ptr(ii));
    }

    FisherDiagonal out;
    out.sample_count = n;
    out.values.assign(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = scores.row_ptr(i);
        for (std::size_t j = 0; j < p; ++j) out.values[j] += row[j] * row[j];
    }
    for (double& v : out.values) v /= static_cast<double>(n);
    return out;
}

double kl_quadratic(const FisherDiagonal& fisher, const std::vector<double>& theta_ref,
                    const std::vector<double>& theta) {
    if (fisher.values.size() != theta_ref.size() || theta_ref.size() != theta.size()) {
        throw std::invalid_argument("kl_quadratic: length mismatch");
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const double d = theta[j] - theta_ref[j];
        acc += fisher.values[j] * d * d;
    }
    return 0.5 * acc;
}

std::vector<double> crlb_bound(const FisherDiagonal& fisher, std::size_t n) {
    if (n == 0) throw std::invalid_argument("crlb_bound: n must be >= 1");
    std::vector<double> out(fisher.values.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = fisher.values[j] > 0.0
                     ? 1.0 / (static_cast<double>(n) * fisher.values[j])
                     : std::numeric_limits<double>::infinity();
    }
    return out;
}

}  // namespace ficsr
