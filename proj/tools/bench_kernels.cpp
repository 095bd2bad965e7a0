// Timing comparison of the OpenMP kernels against their serial references.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "ficsr/dataset.hpp"
#include "ficsr/fisher.hpp"
#include "ficsr/matrix.hpp"
#include "ficsr/mlp.hpp"

using namespace ficsr;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(r, c);
    for (double& v : m.data) v = dist(rng);
    return m;
}

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warmup
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    std::mt19937_64 rng(42);

    std::printf("%-28s %12s %12s %8s\n", "kernel", "serial (ms)", "omp (ms)", "speedup");
    for (std::size_t n : {128, 256, 512, 1024}) {
        Matrix a = random_matrix(n, n, rng);
        Matrix b = random_matrix(n, n, rng);
        Matrix c;
        const double ts = time_ms([&] { kernels::matmul_serial(a, b, c); }, 3);
        const double tp = time_ms([&] { kernels::matmul(a, b, c); }, 3);
        std::printf("matmul %4zux%-4zu             %12.3f %12.3f %7.2fx\n", n, n, ts, tp,
                    ts / tp);
    }

    // empirical Fisher over a growing sample
    for (std::size_t n : {500, 2000, 8000}) {
        Dataset ds;
        ds.n_classes = 2;
        ds.features = random_matrix(n, 10, rng);
        ds.labels.resize(n);
        std::bernoulli_distribution coin(0.5);
        for (auto& y : ds.labels) y = coin(rng) ? 1 : 0;
        MlpModel model = mlp_init({{10, 8}, {8, 2}}, 7);
        const double tf =
            time_ms([&] { FisherDiagonal f = empirical_fisher_diag(model, ds); (void)f; }, 3);
        std::printf("fisher_diag n=%-6zu                       %12.3f\n", n, tf);
    }
    return 0;
}
