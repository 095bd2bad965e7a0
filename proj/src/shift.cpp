#include "ficsr/shift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ficsr {

Image rotate_single(const Image& img, double degrees) {
    if (img.width == 0 || img.height == 0) {
        throw std::invalid_argument("rotate_single: zero-sized image");
    }
    const double rad = degrees * M_PI / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    const double cx = (static_cast<double>(img.width) - 1.0) / 2.0;
    const double cy = (static_cast<double>(img.height) - 1.0) / 2.0;
    Image out;
    out.width = img.width;
    out.height = img.height;
    out.pixels.assign(img.pixels.size(), 0.0);
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            // inverse mapping: sample the source at the back-rotated point
            const double dx = static_cast<double>(x) - cx;
            const double dy = static_cast<double>(y) - cy;
            const double sx = c * dx + s * dy + cx;
            const double sy = -s * dx + c * dy + cy;
            const double fx = std::floor(sx);
            const double fy = std::floor(sy);
            const long x0 = static_cast<long>(fx);
            const long y0 = static_cast<long>(fy);
            const double tx = sx - fx;
            const double ty = sy - fy;
            auto at = [&](long xi, long yi) -> double {
                if (xi < 0 || yi < 0 || xi >= static_cast<long>(img.width) ||
                    yi >= static_cast<long>(img.height)) {
                    return 0.0;
                }
                return img.pixels[static_cast<std::size_t>(yi) * img.width +
                                  static_cast<std::size_t>(xi)];
            };
            const double v = (1.0 - tx) * (1.0 - ty) * at(x0, y0) +
                             tx * (1.0 - ty) * at(x0 + 1, y0) +
                             (1.0 - tx) * ty * at(x0, y0 + 1) +
                             tx * ty * at(x0 + 1, y0 + 1);
            out.pixels[y * img.width + x] = v;
        }
    }
    return out;
}

double beta_sample(double a, double b, std::mt19937_64& rng) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("beta_sample: a, b must be > 0");
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    return x / (x + y);
}

std::vector<Image> beta_rotation_shift(const std::vector<Image>& images, double a, double b,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Image> out;
    out.reserve(images.size());
    for (const Image& img : images) {
        const double angle = 180.0 * beta_sample(a, b, rng);
        out.push_back(rotate_single(img, angle));
    }
    return out;
}

namespace {

// First principal direction of the standardized data via power iteration.
std::vector<double> principal_direction(const Matrix& x) {
    const std::size_t d = x.cols;
    // covariance of standardized columns
    Standardizer st = Standardizer::fit(x);
    Matrix z = st.transform(x);
    Matrix cov(d, d);
    for (std::size_t i = 0; i < z.rows; ++i) {
        const double* row = z.row_ptr(i);
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = 0; q < d; ++q) cov(p, q) += row[p] * row[q];
        }
    }
    for (double& v : cov.data) v /= static_cast<double>(z.rows);
    std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
    std::vector<double> w(d);
    for (int iter = 0; iter < 200; ++iter) {
        for (std::size_t p = 0; p < d; ++p) {
            double acc = 0.0;
            for (std::size_t q = 0; q < d; ++q) acc += cov(p, q) * v[q];
            w[p] = acc;
        }
        double norm = 0.0;
        for (double u : w) norm += u * u;
        norm = std::sqrt(norm);
        if (norm < 1e-14) break;  // zero covariance; keep the uniform direction
        for (std::size_t p = 0; p < d; ++p) v[p] = w[p] / norm;
    }
    return v;
}

}  // namespace

SubsampleResult biased_subsample(const Dataset& data, double severity, double keep_fraction,
                                 std::uint64_t seed) {
    const std::size_t n = data.size();
    if (n == 0) throw std::invalid_argument("biased_subsample: empty dataset");
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
        throw std::invalid_argument("biased_subsample: keep_fraction must be in (0,1]");
    }
    if (severity < 0.0) throw std::invalid_argument("biased_subsample: severity must be >= 0");

    Standardizer st = Standardizer::fit(data.features);
    Matrix z = st.transform(data.features);
    const std::vector<double> dir = principal_direction(data.features);

    std::vector<double> proj(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = z.row_ptr(i);
        for (std::size_t j = 0; j < z.cols; ++j) proj[i] += row[j] * dir[j];
    }
    // standardize the projection itself
    double mu = std::accumulate(proj.begin(), proj.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double p : proj) var += (p - mu) * (p - mu);
    var /= static_cast<double>(n);
    const double sd = var > 1e-24 ? std::sqrt(var) : 1.0;

    std::vector<double> weight(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double zi = (proj[i] - mu) / sd;
        weight[i] = 1.0 / (1.0 + std::exp(-severity * zi));
    }

    // weighted sampling without replacement (Efraimidis-Spirakis keys)
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<std::pair<double, std::size_t>> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::max(uni(rng), 1e-300);
        keys[i] = {std::pow(u, 1.0 / std::max(weight[i], 1e-300)), i};
    }
    std::sort(keys.begin(), keys.end(), [](const auto& l, const auto& r) {
        if (l.first != r.first) return l.first > r.first;
        return l.second < r.second;
    });
    const std::size_t n_keep = static_cast<std::size_t>(
        std::ceil(keep_fraction * static_cast<double>(n)));
    std::vector<std::size_t> idx;
    idx.reserve(n_keep);
    for (std::size_t i = 0; i < n_keep; ++i) idx.push_back(keys[i].second);
    std::sort(idx.begin(), idx.end());

    SubsampleResult res;
    res.indices = idx;
    res.data = select_rows(data, idx);
    std::vector<bool> seen(static_cast<std::size_t>(std::max(data.n_classes, 1)), false);
    for (int label : res.data.labels) {
        if (label >= 0 && static_cast<std::size_t>(label) < seen.size()) {
            seen[static_cast<std::size_t>(label)] = true;
        }
    }
    for (std::size_t c = 0; c < seen.size(); ++c) {
        if (!seen[c]) {
            res.warnings.push_back("class " + std::to_string(c) +
                                   " vanished from the biased subsample");
        }
    }
    return res;
}

Dataset gaussian_noise_inject(const Dataset& data, double std, std::uint64_t seed) {
    if (std < 0.0) throw std::invalid_argument("gaussian_noise_inject: std must be >= 0");
    Dataset out = data;
    if (std == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, std);
    for (double& v : out.features.data) v += noise(rng);
    return out;
}

std::pair<Dataset, Dataset> gen_gaussian_blobs(std::size_t n_train, std::size_t n_test,
                                               std::size_t d, double class_sep,
                                               double test_mean_shift, std::uint64_t seed) {
    if (d == 0 || n_train < 2 || n_test < 2) {
        throw std::invalid_argument("gen_gaussian_blobs: need d >= 1 and n >= 2 per split");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    auto make = [&](std::size_t n, double mean_shift) {
        Dataset ds;
        ds.n_classes = 2;
        ds.features = Matrix(n, d);
        ds.labels.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const int label = coin(rng) ? 1 : 0;
            ds.labels[i] = label;
            // class centres at +/- class_sep/2 along the first axis
            const double centre = (label == 1 ? 0.5 : -0.5) * class_sep;
            for (std::size_t j = 0; j < d; ++j) {
                double v = unit(rng);
                if (j == 0) v += centre + mean_shift;
                ds.features(i, j) = v;
            }
        }
        return ds;
    };
    Dataset train = make(n_train, 0.0);
    Dataset test = make(n_test, test_mean_shift);
    return {std::move(train), std::move(test)};
}

}  // namespace ficsr
