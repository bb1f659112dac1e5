#include "ksn/metrics.hpp"
#include "ksn/rng.hpp"

#include <doctest.h>

using namespace ksn;

namespace {

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values)
        v[i++] = x;
    return v;
}

GroundTruth truth_with(std::initializer_list<double> w) {
    GroundTruth truth;
    truth.w_star = vec(w);
    truth.support = support_of(truth.w_star, 0.0);
    truth.y_clean = Vector::Zero(1);
    return truth;
}

} // namespace

TEST_CASE("support_of") {
    CHECK(support_of(vec({0, 2, 0, -1}), 0.0) == IndexSet{1, 3});
    CHECK(support_of(vec({1e-12, 1}), 1e-8) == IndexSet{1});
    CHECK(support_of(vec({0, 0}), 0.0).empty());
    CHECK_THROWS_AS(support_of(vec({1}), -1.0), std::invalid_argument);
}

TEST_CASE("support_of is monotone in the tolerance") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        Vector w(10);
        for (Eigen::Index i = 0; i < 10; ++i)
            w[i] = rng.normal() * (rng.uniform() < 0.3 ? 1e-9 : 1.0);
        size_t previous = support_of(w, 0.0).size();
        for (double tol : {1e-10, 1e-8, 1e-4, 1e-1, 10.0}) {
            const size_t count = support_of(w, tol).size();
            CHECK(count <= previous);
            previous = count;
        }
    }
}

TEST_CASE("f1_support") {
    const GroundTruth truth = truth_with({1, 0, -2, 0});

    SUBCASE("exact support gives (1,1,1)") {
        const F1Score s = f1_support(vec({5, 0, 1, 0}), truth, 0.0);
        CHECK(s.f1 == 1.0);
        CHECK(s.precision == 1.0);
        CHECK(s.recall == 1.0);
    }
    SUBCASE("all of the support plus as many extras") {
        const F1Score s = f1_support(vec({1, 1, 1, 1}), truth, 0.0);
        CHECK(s.precision == doctest::Approx(0.5));
        CHECK(s.recall == doctest::Approx(1.0));
        CHECK(s.f1 == doctest::Approx(2.0 / 3.0));
    }
    SUBCASE("disjoint supports give zeros") {
        const F1Score s = f1_support(vec({0, 1, 0, 1}), truth, 0.0);
        CHECK(s.f1 == 0.0);
        CHECK(s.precision == 0.0);
        CHECK(s.recall == 0.0);
    }
    SUBCASE("empty prediction gives zeros by convention") {
        const F1Score s = f1_support(vec({0, 0, 0, 0}), truth, 0.0);
        CHECK(s.f1 == 0.0);
        CHECK(s.precision == 0.0);
    }
}

TEST_CASE("f1 stays in [0,1] and is 1 only for equal supports") {
    Rng rng(77);
    const GroundTruth truth = truth_with({1, 0, -2, 0, 3, 0});
    for (int trial = 0; trial < 200; ++trial) {
        Vector w(6);
        for (Eigen::Index i = 0; i < 6; ++i)
            w[i] = rng.uniform() < 0.4 ? 0.0 : rng.normal();
        const F1Score s = f1_support(w, truth, 0.0);
        CHECK(s.f1 >= 0.0);
        CHECK(s.f1 <= 1.0);
        const bool equal_supports = support_of(w, 0.0) == truth.support;
        CHECK((s.f1 == 1.0) == equal_supports);
    }
}

TEST_CASE("model_error") {
    const GroundTruth truth = truth_with({1, 0, -2, 0});
    CHECK(model_error(truth.w_star, truth) == 0.0);
    CHECK(model_error(Vector::Zero(4), truth) ==
          doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("extract_path") {
    const GroundTruth truth = truth_with({1, 0, -2, 0});

    SUBCASE("empty run yields empty rows") {
        SolverRun run;
        run.solver = "iht";
        CHECK(extract_path(run, truth).empty());
    }
    SUBCASE("single snapshot of w* yields a perfect row") {
        SolverRun run;
        run.solver = "iht";
        run.snapshots.emplace_back(0, truth.w_star);
        const auto rows = extract_path(run, truth);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].f1 == 1.0);
        CHECK(rows[0].err2 == 0.0);
        CHECK(rows[0].sparsity == 2);
        CHECK(rows[0].algorithm == "iht");
    }
}

TEST_CASE("csv line format") {
    MetricRow row;
    row.algorithm = "irksn";
    row.seed = 3;
    row.hyperparams = {{"alpha", 0.01}};
    row.iteration_or_lambda = 250;
    row.f1 = 0.75;
    row.precision = 0.6;
    row.recall = 1.0;
    row.err2 = 0.125;
    row.sparsity = 12;
    CHECK(metric_csv_header() ==
          "algorithm,seed,params,iter,f1,precision,recall,err2,sparsity");
    CHECK(to_csv_line(row) == "irksn,3,alpha=0.01,250,0.75,0.6,1,0.125,12");
}

TEST_CASE("per-algorithm support tolerances") {
    CHECK(support_tol_for("irosr") == kSupportTolApprox);
    CHECK(support_tol_for("irksn") == kSupportTolExact);
    CHECK(support_tol_for("lasso") == kSupportTolExact);
}
