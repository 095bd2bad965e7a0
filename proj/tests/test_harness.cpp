#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "ficsr/harness.hpp"

using namespace ficsr;

namespace {

void check_partition(const FragmentPlan& plan, std::size_t n) {
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto& frag : plan.fragments) {
        total += frag.size();
        for (std::size_t i : frag) {
            REQUIRE(i < n);
            REQUIRE(seen.insert(i).second);  // disjoint
        }
    }
    REQUIRE(total == n);  // covering
}

ExperimentConfig fast_config() {
    ExperimentConfig c;
    c.blobs = {240, 100, 2, 6.0, 0.0};
    c.train.epochs = 250;
    c.train.learning_rate = 1e-2;
    c.trials = 1;
    c.base_seed = 5;
    return c;
}

}  // namespace

TEST_CASE("batch plan fixed shapes") {
    FragmentPlan p = make_batch_plan(100, 0.05, 1);
    REQUIRE(p.fragments.size() == 20);
    for (const auto& f : p.fragments) CHECK(f.size() == 5);
    check_partition(p, 100);

    p = make_batch_plan(100, 0.5, 2);
    REQUIRE(p.fragments.size() == 2);
    for (const auto& f : p.fragments) CHECK(f.size() == 50);

    p = make_batch_plan(103, 0.25, 3);
    REQUIRE(p.fragments.size() == 4);
    CHECK(p.fragments[0].size() == 25);
    CHECK(p.fragments[1].size() == 25);
    CHECK(p.fragments[2].size() == 25);
    CHECK(p.fragments[3].size() == 28);
    check_partition(p, 103);

    CHECK_THROWS_AS(make_batch_plan(10, 0.05, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_batch_plan(10, 0.0, 0), std::invalid_argument);
}

TEST_CASE("fold plan fixed shapes") {
    FragmentPlan p = make_fold_plan(10, 5, 1);
    REQUIRE(p.fragments.size() == 5);
    for (const auto& f : p.fragments) CHECK(f.size() == 2);
    check_partition(p, 10);

    p = make_fold_plan(10, 3, 2);
    std::vector<std::size_t> sizes;
    for (const auto& f : p.fragments) sizes.push_back(f.size());
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{3, 3, 4});

    CHECK_THROWS_AS(make_fold_plan(5, 6, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_fold_plan(5, 1, 0), std::invalid_argument);
}

TEST_CASE("random plans are valid partitions") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::size_t> nd(10, 500);
    std::uniform_real_distribution<double> rd(0.02, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = nd(rng);
        const double ratio = rd(rng);
        if (static_cast<std::size_t>(n * ratio) == 0) continue;
        check_partition(make_batch_plan(n, ratio, trial), n);
        std::uniform_int_distribution<std::size_t> kd(2, n);
        const std::size_t k = kd(rng);
        FragmentPlan fold = make_fold_plan(n, k, trial);
        check_partition(fold, n);
        std::size_t mx = 0, mn = n;
        for (const auto& f : fold.fragments) {
            mx = std::max(mx, f.size());
            mn = std::min(mn, f.size());
        }
        CHECK(mx - mn <= 1);
    }
}

TEST_CASE("integral CV reaches high accuracy on separated blobs") {
    ExperimentConfig c = fast_config();
    c.trials = 3;
    ExperimentResult r = run_integral_cv(c);
    REQUIRE(r.trials.size() == 3);
    std::set<std::uint64_t> seeds;
    for (const auto& t : r.trials) {
        CHECK(t.report.mean_mu >= 0.99);
        seeds.insert(t.trial_seed);
    }
    CHECK(seeds.size() == 3);  // all seeds recorded and distinct

    ExperimentResult again = run_integral_cv(c);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.trials[i].report.mean_mu == again.trials[i].report.mean_mu);
    }
}

TEST_CASE("ratio 1.0 fragmentation is a single run with zero variance") {
    ExperimentConfig c = fast_config();
    c.batch_ratio = 1.0;
    ExperimentResult r = run_fragmented_stcv(c);
    REQUIRE(r.trials.size() == 1);
    CHECK(r.trials[0].report.per_fragment_accuracy.size() == 1);
    CHECK(r.trials[0].report.var_population == 0.0);
    CHECK(r.trials[0].report.mean_mu == r.trials[0].report.per_fragment_accuracy[0]);
}

TEST_CASE("ficsr with lambda 0 and no warm start reduces to fragmented st-CV bitwise") {
    ExperimentConfig c = fast_config();
    c.batch_ratio = 0.25;
    c.trials = 2;
    c.shift.kind = ShiftKind::BiasedSubsample;
    c.shift.severity = 1.0;
    c.shift.keep_fraction = 0.8;
    c.penalty.lambda = 0.0;
    c.warm_start = false;
    ExperimentResult stcv = run_fragmented_stcv(c);
    ExperimentResult ficsr = run_ficsr_sequential(c);
    REQUIRE(stcv.trials.size() == ficsr.trials.size());
    for (std::size_t t = 0; t < stcv.trials.size(); ++t) {
        CHECK(stcv.trials[t].report.per_fragment_accuracy ==
              ficsr.trials[t].report.per_fragment_accuracy);
    }
}

TEST_CASE("two-fold CV on separated blobs is accurate on both folds") {
    ExperimentConfig c = fast_config();
    c.fragment_mode = FragmentMode::Fold;
    c.k_folds = 2;
    ExperimentResult r = run_kfold(c, Method::StCv);
    REQUIRE(r.trials[0].report.per_fragment_accuracy.size() == 2);
    for (double acc : r.trials[0].report.per_fragment_accuracy) CHECK(acc >= 0.95);
}

TEST_CASE("ficsr k-fold with lambda 0 and no warm start equals st-CV k-fold") {
    ExperimentConfig c = fast_config();
    c.k_folds = 3;
    c.penalty.lambda = 0.0;
    c.warm_start = false;
    ExperimentResult stcv = run_kfold(c, Method::StCv);
    ExperimentResult ficsr = run_kfold(c, Method::Ficsr);
    CHECK(stcv.trials[0].report.per_fragment_accuracy ==
          ficsr.trials[0].report.per_fragment_accuracy);
}

TEST_CASE("lambda sweep shares plans across lambda values") {
    ExperimentConfig c = fast_config();
    c.batch_ratio = 0.5;
    auto sweep = lambda_sweep(c, {0.0, 0.1});
    REQUIRE(sweep.size() == 2);
    // identical seeds: the matched st-CV baseline is identical across lambdas
    CHECK(sweep.at(0.0).trials[0].report.baseline_accuracy ==
          sweep.at(0.1).trials[0].report.baseline_accuracy);
    CHECK(sweep.at(0.0).trials[0].trial_seed == sweep.at(0.1).trials[0].trial_seed);
    CHECK_THROWS_AS(lambda_sweep(c, {}), std::invalid_argument);
    CHECK_THROWS_AS(lambda_sweep(c, {-0.5}), std::invalid_argument);
}

TEST_CASE("noise ablation at std 0 equals the unshifted run") {
    ExperimentConfig c = fast_config();
    c.batch_ratio = 0.5;
    auto levels = noise_ablation(c, {0.0});
    ExperimentResult plain = run_fragmented_stcv(c);
    CHECK(levels.at(0.0).stcv.trials[0].report.per_fragment_accuracy ==
          plain.trials[0].report.per_fragment_accuracy);
}

TEST_CASE("weighted baselines run and erm matches the integral accuracy") {
    ExperimentConfig c = fast_config();
    c.blobs.test_mean_shift = 1.0;  // validation drawn from the shifted test blob
    ExperimentResult erm = run_weighted_baseline(c, Method::Erm);
    ExperimentResult iwerm = run_weighted_baseline(c, Method::Iwerm);
    ExperimentResult eiwerm = run_weighted_baseline(c, Method::Eiwerm);
    ExperimentResult riwerm = run_weighted_baseline(c, Method::Riwerm);
    CHECK(erm.trials[0].report.mean_mu == erm.trials[0].report.baseline_accuracy);
    for (const ExperimentResult* r : {&iwerm, &eiwerm, &riwerm}) {
        CHECK(r->trials[0].report.mean_mu >= 0.5);  // sanity on separable blobs
    }
    CHECK_THROWS_AS(run_weighted_baseline(c, Method::Ficsr), std::invalid_argument);
}

TEST_CASE("method names round trip") {
    for (Method m : {Method::StCv, Method::Ficsr, Method::Erm, Method::Iwerm, Method::Eiwerm,
                     Method::Riwerm}) {
        CHECK(method_from_name(method_name(m)) == m);
    }
    CHECK_THROWS_AS(method_from_name("bogus"), std::invalid_argument);
}
