#include <doctest.h>

#include <cmath>
#include <random>

#include "ficsr/mlp.hpp"

using namespace ficsr;

namespace {

Matrix random_inputs(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix x(n, d);
    for (double& v : x.data) v = dist(rng);
    return x;
}

std::vector<int> random_labels(std::size_t n, int classes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, classes - 1);
    std::vector<int> y(n);
    for (int& v : y) v = dist(rng);
    return y;
}

// Central finite differences of the loss, the oracle for grad_loss.
std::vector<double> fd_gradient(MlpModel model, const Matrix& x, const std::vector<int>& y,
                                double step) {
    std::vector<double> g(model.params.values.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double orig = model.params.values[k];
        model.params.values[k] = orig + step;
        const double up = cross_entropy(mlp_forward(model, x), y);
        model.params.values[k] = orig - step;
        const double dn = cross_entropy(mlp_forward(model, x), y);
        model.params.values[k] = orig;
        g[k] = (up - dn) / (2.0 * step);
    }
    return g;
}

}  // namespace

TEST_CASE("mlp_init is deterministic and zero-biased") {
    const std::vector<LayerShape> shapes = {{2, 4}, {4, 2}};
    MlpModel a = mlp_init(shapes, 7);
    MlpModel b = mlp_init(shapes, 7);
    CHECK(a.params.values == b.params.values);
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        const double* bias = a.params.values.data() + a.params.bias_offset(l);
        for (std::size_t j = 0; j < shapes[l].out; ++j) CHECK(bias[j] == 0.0);
    }
    MlpModel c = mlp_init(shapes, 8);
    CHECK(a.params.values != c.params.values);
}

TEST_CASE("mlp_init rejects a broken layer chain") {
    CHECK_THROWS_AS(mlp_init({{3, 4}, {5, 2}}, 0), std::invalid_argument);
}

TEST_CASE("forward of the all-zero model is uniform") {
    const std::vector<LayerShape> shapes = {{2, 4}, {4, 3}};
    MlpModel model = mlp_init(shapes, 0);
    std::fill(model.params.values.begin(), model.params.values.end(), 0.0);
    Matrix x = random_inputs(5, 2, 1);
    Matrix p = mlp_forward(model, x);
    for (std::size_t i = 0; i < p.rows; ++i) {
        for (std::size_t j = 0; j < 3; ++j) CHECK(p(i, j) == doctest::Approx(1.0 / 3.0));
    }
}

TEST_CASE("softmax is invariant to a constant bias shift of the final layer") {
    const std::vector<LayerShape> shapes = {{3, 4}, {4, 2}};
    MlpModel model = mlp_init(shapes, 3);
    Matrix x = random_inputs(1, 3, 4);
    Matrix p1 = mlp_forward(model, x);
    double* bias = model.params.values.data() + model.params.bias_offset(1);
    for (std::size_t j = 0; j < 2; ++j) bias[j] += 2.5;
    Matrix p2 = mlp_forward(model, x);
    for (std::size_t j = 0; j < 2; ++j) CHECK(p1(0, j) == doctest::Approx(p2(0, j)).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to 1 for random models") {
    for (int trial = 0; trial < 20; ++trial) {
        MlpModel model = mlp_init({{4, 5}, {5, 3}}, 10 + trial);
        Matrix x = random_inputs(17, 4, 50 + trial);
        Matrix p = mlp_forward(model, x);
        for (std::size_t i = 0; i < p.rows; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < p.cols; ++j) {
                CHECK(p(i, j) >= 0.0);
                sum += p(i, j);
            }
            CHECK(std::abs(sum - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("cross_entropy fixed values") {
    Matrix uniform(2, 4, 0.25);
    CHECK(cross_entropy(uniform, {1, 3}) == doctest::Approx(std::log(4.0)).epsilon(1e-9));

    Matrix onehot(2, 2);
    onehot(0, 0) = 1.0;
    onehot(1, 1) = 1.0;
    CHECK(cross_entropy(onehot, {0, 1}) == doctest::Approx(0.0).epsilon(1e-9));

    Matrix p(1, 2);
    p(0, 0) = 0.8;
    p(0, 1) = 0.2;
    CHECK(cross_entropy(p, {0}) == doctest::Approx(-std::log(0.8)).epsilon(1e-9));
}

TEST_CASE("cross_entropy rejects out-of-range labels and is non-negative") {
    Matrix p(1, 2, 0.5);
    CHECK_THROWS_AS(cross_entropy(p, {2}), std::out_of_range);
    for (int trial = 0; trial < 10; ++trial) {
        MlpModel model = mlp_init({{3, 4}, {4, 3}}, trial);
        Matrix x = random_inputs(9, 3, trial);
        CHECK(cross_entropy(mlp_forward(model, x), random_labels(9, 3, trial)) >= 0.0);
    }
}

TEST_CASE("grad_loss matches central finite differences") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> dim(2, 5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = dim(rng);
        const std::size_t h = dim(rng);
        const std::size_t c = dim(rng);
        MlpModel model = mlp_init({{d, h}, {h, std::max<std::size_t>(2, c)}}, 1000 + trial,
                                  trial % 2 ? Activation::Tanh : Activation::Relu);
        const std::size_t classes = std::max<std::size_t>(2, c);
        Matrix x = random_inputs(6, d, 2000 + trial);
        std::vector<int> y = random_labels(6, static_cast<int>(classes), 3000 + trial);
        ParamVector g = grad_loss(model, x, y);
        std::vector<double> fd = fd_gradient(model, x, y, 1e-5);
        for (std::size_t k = 0; k < g.values.size(); ++k) {
            const double denom = std::max(1.0, std::abs(fd[k]));
            CHECK(std::abs(g.values[k] - fd[k]) / denom < 1e-4);
        }
    }
}

TEST_CASE("gradient with a zero penalty vector is unchanged") {
    MlpModel model = mlp_init({{3, 4}, {4, 2}}, 5);
    Matrix x = random_inputs(7, 3, 6);
    std::vector<int> y = random_labels(7, 2, 7);
    ParamVector g1 = grad_loss(model, x, y);
    std::vector<double> zeros(model.params.values.size(), 0.0);
    ParamVector g2 = grad_loss(model, x, y, &zeros);
    CHECK(g1.values == g2.values);
}

TEST_CASE("gradient norm is small at a trained optimum") {
    // linearly separable 1-feature toy, trained to convergence
    Dataset ds;
    ds.n_classes = 2;
    ds.features = Matrix(20, 1);
    ds.labels.resize(20);
    for (std::size_t i = 0; i < 20; ++i) {
        ds.features(i, 0) = (i < 10) ? -1.0 - 0.1 * static_cast<double>(i)
                                     : 1.0 + 0.1 * static_cast<double>(i - 10);
        ds.labels[i] = i < 10 ? 0 : 1;
    }
    TrainConfig cfg;
    cfg.epochs = 4000;
    cfg.learning_rate = 5e-3;
    TrainResult res = train(mlp_init({{1, 4}, {4, 2}}, 11), ds, cfg);
    ParamVector g = grad_loss(res.model, ds.features, ds.labels);
    double norm = 0.0;
    for (double v : g.values) norm += v * v;
    CHECK(std::sqrt(norm) < 1e-3);
}

TEST_CASE("adam_step leaves params unchanged for zero gradient") {
    std::vector<double> params = {0.5, -0.25, 1.0};
    std::vector<double> grad(3, 0.0);
    AdamState state(3);
    TrainConfig cfg;
    adam_step(params, grad, state, cfg);
    CHECK(params == std::vector<double>{0.5, -0.25, 1.0});
}

TEST_CASE("first adam step has the closed-form magnitude lr*sign(g)") {
    for (double g : {0.3, -2.0, 1e-4}) {
        std::vector<double> params = {0.0};
        AdamState state(1);
        TrainConfig cfg;
        adam_step(params, {g}, state, cfg);
        const double expected = -cfg.learning_rate * g / (std::abs(g) + cfg.adam_eps);
        CHECK(params[0] == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("training is deterministic and solves XOR") {
    Dataset xorset;
    xorset.n_classes = 2;
    xorset.features = Matrix(4, 2);
    xorset.features(0, 0) = 0; xorset.features(0, 1) = 0;
    xorset.features(1, 0) = 0; xorset.features(1, 1) = 1;
    xorset.features(2, 0) = 1; xorset.features(2, 1) = 0;
    xorset.features(3, 0) = 1; xorset.features(3, 1) = 1;
    xorset.labels = {0, 1, 1, 0};

    TrainConfig cfg;
    cfg.epochs = 1500;
    cfg.learning_rate = 5e-2;

    bool solved = false;
    for (std::uint64_t seed = 0; seed < 5 && !solved; ++seed) {
        TrainResult res = train(mlp_init({{2, 4}, {4, 2}}, seed), xorset, cfg);
        for (double l : res.loss_trace) REQUIRE(std::isfinite(l));
        solved = accuracy(res.model, xorset) == 1.0;
    }
    CHECK(solved);

    TrainResult a = train(mlp_init({{2, 4}, {4, 2}}, 1), xorset, cfg);
    TrainResult b = train(mlp_init({{2, 4}, {4, 2}}, 1), xorset, cfg);
    CHECK(a.model.params.values == b.model.params.values);
    CHECK(a.loss_trace == b.loss_trace);
}

TEST_CASE("constant-zero augmenter reproduces the plain trajectory") {
    Dataset ds;
    ds.n_classes = 2;
    ds.features = Matrix(10, 2);
    ds.labels.resize(10);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (std::size_t i = 0; i < 10; ++i) {
        ds.features(i, 0) = dist(rng);
        ds.features(i, 1) = dist(rng);
        ds.labels[i] = ds.features(i, 0) > 0 ? 1 : 0;
    }
    TrainConfig cfg;
    cfg.epochs = 100;
    LossAugmenter zero = [](const std::vector<double>&, std::vector<double>&) { return 0.0; };
    TrainResult plain = train(mlp_init({{2, 4}, {4, 2}}, 9), ds, cfg);
    TrainResult aug = train(mlp_init({{2, 4}, {4, 2}}, 9), ds, cfg, &zero);
    CHECK(plain.model.params.values == aug.model.params.values);
}

TEST_CASE("train rejects an empty dataset") {
    Dataset empty;
    empty.n_classes = 2;
    TrainConfig cfg;
    CHECK_THROWS_AS(train(mlp_init({{2, 4}, {4, 2}}, 0), empty, cfg), std::invalid_argument);
}
