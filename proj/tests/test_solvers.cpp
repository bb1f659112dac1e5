#include "ksn/conditions.hpp"
#include "ksn/datagen.hpp"
#include "ksn/metrics.hpp"
#include "ksn/rng.hpp"
#include "ksn/solvers.hpp"

#include <doctest.h>

#include <cmath>

using namespace ksn;

namespace {

ProblemInstance random_instance(Eigen::Index n, Eigen::Index d,
                                std::uint64_t seed, double noise = 0.0) {
    Rng rng(seed);
    ProblemInstance instance;
    instance.X.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            instance.X(i, j) = rng.normal();
    instance.y_delta.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        instance.y_delta[i] = rng.normal() * (noise > 0 ? noise : 1.0);
    instance.delta = 0.0;
    return instance;
}

} // namespace

TEST_CASE("momentum sequence starts at the golden ratio and obeys the recurrence") {
    ProblemInstance instance;
    instance.X = Matrix::Identity(3, 3);
    instance.y_delta = Vector::Zero(3);
    IrksnConfig config;
    config.k = 2;
    config.alpha = 0.5;
    config.max_iter = 50;

    std::vector<double> thetas = {1.0}; // theta_0
    irksn(instance, config, [&](const SolverState& state) {
        thetas.push_back(state.theta);
    });
    CHECK(thetas[1] == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
    for (size_t t = 0; t + 1 < thetas.size(); ++t) {
        const double expected =
            (1.0 + std::sqrt(1.0 + 4.0 * thetas[t] * thetas[t])) / 2.0;
        CHECK(thetas[t + 1] == doctest::Approx(expected).epsilon(1e-15));
        CHECK(thetas[t + 1] > thetas[t]);
    }
}

TEST_CASE("zero target keeps every iterate at zero") {
    ProblemInstance instance = random_instance(6, 10, 2);
    instance.y_delta.setZero();

    IrksnConfig config;
    config.k = 3;
    config.alpha = 0.2;
    config.max_iter = 25;
    for (const auto& [t, w] : irksn(instance, config).snapshots)
        CHECK(w.norm() == 0.0);

    for (const auto& [t, w] : iht(instance, 3, 0.01, 25).snapshots)
        CHECK(w.norm() == 0.0);
    for (const auto& [t, w] : srdi(instance, 0.1, 0.1, 25).snapshots)
        CHECK(w.norm() == 0.0);
    for (const auto& [t, w] : ircr(instance, 25).snapshots)
        CHECK(w.norm() == 0.0);
    for (const auto& [t, w] : irosr(instance, 0.1, 0.01, 25).snapshots)
        CHECK(w.norm() == 0.0);
}

TEST_CASE("k = d reduces the accelerated method to min-norm least squares") {
    Rng rng(4);
    const Eigen::Index n = 8, d = 5;
    Matrix X(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            X(i, j) = rng.normal();
    Vector w_true(d);
    for (Eigen::Index j = 0; j < d; ++j)
        w_true[j] = rng.normal();
    ProblemInstance instance{X, X * w_true, 0.0};

    IrksnConfig config;
    config.k = d;
    config.alpha = 0.9;
    config.max_iter = 4000;
    config.record_every = 4000;
    const SolverRun run = irksn(instance, config);
    CHECK((run.final_iterate() - w_true).norm() <= 1e-4);
}

TEST_CASE("recording contract: max_iter / record_every rows, final included") {
    ProblemInstance instance = random_instance(5, 8, 3);
    IrksnConfig config;
    config.k = 2;
    config.alpha = 0.3;
    config.max_iter = 100;
    config.record_every = 7;
    const SolverRun run = irksn(instance, config);
    CHECK(run.snapshots.size() == 100 / 7);
    CHECK(run.snapshots.back().first == 97); // last t with (t+1) % 7 == 0
    for (size_t i = 1; i < run.snapshots.size(); ++i)
        CHECK(run.snapshots[i].first > run.snapshots[i - 1].first);

    config.record_every = 1;
    CHECK(irksn(instance, config).snapshots.size() == 100);
}

TEST_CASE("solver runs are deterministic") {
    const auto [instance, truth] = gen_example2(20, 15, 4, 6);
    IrksnConfig config;
    config.k = 4;
    config.alpha = 0.05;
    config.max_iter = 200;
    const SolverRun a = irksn(instance, config);
    const SolverRun b = irksn(instance, config);
    REQUIRE(a.metrics.size() == b.metrics.size());
    for (size_t i = 0; i < a.metrics.size(); ++i) {
        CHECK(a.metrics[i].residual_norm == b.metrics[i].residual_norm);
        CHECK(a.snapshots[i].second == b.snapshots[i].second);
    }
}

TEST_CASE("iht") {
    SUBCASE("orthogonal design recovers in one step") {
        ProblemInstance instance;
        instance.X = Matrix::Identity(5, 5);
        Vector w_true = Vector::Zero(5);
        w_true[1] = 3.0;
        w_true[3] = -1.5;
        instance.y_delta = w_true;
        const SolverRun run = iht(instance, 2, 1.0, 1);
        CHECK((run.final_iterate() - w_true).norm() == 0.0);
    }
    SUBCASE("divergence is reported with the iteration index") {
        ProblemInstance instance = random_instance(10, 20, 5);
        CHECK_THROWS_AS(iht(instance, 5, 1e12, 2000), DivergenceError);
        try {
            iht(instance, 5, 1e12, 2000);
        } catch (const DivergenceError& e) {
            CHECK(e.iteration() >= 0);
            CHECK(std::string(e.what()).find("iteration") != std::string::npos);
        }
    }
    SUBCASE("parameter validation") {
        ProblemInstance instance = random_instance(4, 6, 6);
        CHECK_THROWS_AS(iht(instance, 0, 0.1, 10), std::invalid_argument);
        CHECK_THROWS_AS(iht(instance, 2, -0.1, 10), std::invalid_argument);
    }
}

TEST_CASE("lasso path") {
    Rng rng(8);
    const Eigen::Index n = 12, d = 6;
    Matrix X(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            X(i, j) = rng.normal();
    Vector w_true(d);
    for (Eigen::Index j = 0; j < d; ++j)
        w_true[j] = rng.normal();
    ProblemInstance instance{X, X * w_true, 0.0};

    SUBCASE("above lambda_max the solution is zero") {
        const double lambda_max =
            (X.transpose() * instance.y_delta).cwiseAbs().maxCoeff();
        const auto path = lasso_path(instance, {lambda_max * 1.01});
        CHECK(path[0].w.norm() == 0.0);
    }
    SUBCASE("tiny lambda recovers least squares on an overdetermined system") {
        const auto path = lasso_path(instance, {1e-10});
        CHECK((path[0].w - w_true).norm() <= 1e-6);
    }
    SUBCASE("warm-started full path satisfies the lasso optimality conditions") {
        const auto grid = default_lambda_grid(instance);
        REQUIRE(grid.size() == 100);
        CHECK(grid.front() ==
              doctest::Approx((X.transpose() * instance.y_delta)
                                  .cwiseAbs()
                                  .maxCoeff()));
        CHECK(grid.back() == doctest::Approx(grid.front() * 1e-3));
        const auto path = lasso_path(instance, grid);
        CHECK(path.size() == 100);
        CHECK(path.front().w.norm() <= 1e-12);
        for (size_t p = 0; p < path.size(); p += 9) {
            const auto& point = path[p];
            REQUIRE(point.converged);
            const Vector g =
                X.transpose() * (X * point.w - instance.y_delta);
            for (Eigen::Index j = 0; j < d; ++j) {
                if (point.w[j] != 0.0)
                    CHECK(std::abs(g[j] + point.lambda *
                                              (point.w[j] > 0 ? 1.0 : -1.0)) <=
                          1e-5);
                else
                    CHECK(std::abs(g[j]) <= point.lambda + 1e-5);
            }
        }
    }
    SUBCASE("grid validation") {
        CHECK_THROWS_AS(lasso_path(instance, {}), std::invalid_argument);
        CHECK_THROWS_AS(lasso_path(instance, {1.0, 2.0}), std::invalid_argument);
        CHECK_THROWS_AS(lasso_path(instance, {1.0, -2.0}), std::invalid_argument);
    }
}

TEST_CASE("elasticnet path") {
    Rng rng(9);
    const Eigen::Index n = 14, d = 7;
    Matrix X(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            X(i, j) = rng.normal();
    Vector w_true(d);
    for (Eigen::Index j = 0; j < d; ++j)
        w_true[j] = rng.normal();
    ProblemInstance instance{X, X * w_true, 0.0};

    SUBCASE("ratio 1 reproduces the lasso path") {
        const auto grid = default_lambda_grid(instance, 20);
        const auto lasso = lasso_path(instance, grid);
        const auto enet = elasticnet_path(instance, grid, {1.0});
        REQUIRE(enet.size() == lasso.size());
        for (size_t i = 0; i < enet.size(); ++i)
            CHECK((enet[i].w - lasso[i].w).norm() <= 1e-8);
    }
    SUBCASE("lambda -> 0 recovers least squares") {
        const auto enet = elasticnet_path(instance, {1e-12}, {0.5});
        CHECK((enet[0].w - w_true).norm() <= 1e-6);
    }
    SUBCASE("points carry the (lambda, ratio) pair") {
        const auto enet = elasticnet_path(instance, {1.0, 0.5}, {0.3, 0.8});
        REQUIRE(enet.size() == 4);
        CHECK(enet[0].l1_ratio == 0.3);
        CHECK(enet[3].lambda == 0.5);
    }
}

TEST_CASE("ksn penalized") {
    Rng rng(10);
    const Eigen::Index n = 10, d = 5;
    Matrix X(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            X(i, j) = rng.normal();
    Vector w_true(d);
    for (Eigen::Index j = 0; j < d; ++j)
        w_true[j] = rng.normal();
    ProblemInstance instance{X, X * w_true, 0.0};
    const double L = spectral_norm(instance.X);

    SUBCASE("lambda = 0 is plain gradient descent towards least squares") {
        const SolverRun run =
            ksn_penalized(instance, 2, 0.0, L * L, 3000, 3000);
        CHECK((run.final_iterate() - w_true).norm() <= 1e-6);
    }
    SUBCASE("k = d fixed point solves the ridge normal equations") {
        const double lambda = 0.7;
        const SolverRun run =
            ksn_penalized(instance, d, lambda, L * L, 5000, 5000);
        const Vector w = run.final_iterate();
        const Vector residual =
            (X.transpose() * X + lambda * Matrix::Identity(d, d)) * w -
            X.transpose() * instance.y_delta;
        CHECK(residual.norm() <= 1e-6);
    }
    SUBCASE("objective is monotone non-increasing") {
        const double lambda = 0.4;
        const SolverRun run = ksn_penalized(instance, 2, lambda, L * L, 300, 1);
        double previous = std::numeric_limits<double>::infinity();
        for (const auto& [t, w] : run.snapshots) {
            const double ksp = ksup_norm(w, 2);
            const double objective =
                0.5 * (X * w - instance.y_delta).squaredNorm() +
                0.5 * lambda * ksp * ksp;
            CHECK(objective <= previous + 1e-12);
            previous = objective;
        }
    }
}

TEST_CASE("omp") {
    SUBCASE("identity design selects the k largest targets") {
        ProblemInstance instance;
        instance.X = Matrix::Identity(6, 6);
        Vector y(6);
        y << 0.1, -3, 0.5, 2, -0.2, 0.05;
        instance.y_delta = y;
        const Vector w = omp(instance, 2);
        CHECK(support_of(w, 0.0) == IndexSet{1, 3});
        CHECK(w[1] == doctest::Approx(-3.0));
    }
    SUBCASE("1-sparse recovery with normalized columns") {
        Rng rng(11);
        Matrix X(8, 12);
        for (Eigen::Index i = 0; i < 8; ++i)
            for (Eigen::Index j = 0; j < 12; ++j)
                X(i, j) = rng.normal();
        for (Eigen::Index j = 0; j < 12; ++j)
            X.col(j) /= X.col(j).norm();
        ProblemInstance instance{X, 2.5 * X.col(7), 0.0};
        const Vector w = omp(instance, 1);
        CHECK(support_of(w, 0.0) == IndexSet{7});
        CHECK(w[7] == doctest::Approx(2.5).epsilon(1e-10));
    }
    SUBCASE("well-separated random instance: support found, residual tiny") {
        Rng rng(12);
        Matrix X(20, 50);
        for (Eigen::Index i = 0; i < 20; ++i)
            for (Eigen::Index j = 0; j < 50; ++j)
                X(i, j) = rng.normal();
        for (Eigen::Index j = 0; j < 50; ++j)
            X.col(j) /= X.col(j).norm();
        GroundTruth truth;
        truth.support = {4, 17, 23, 31, 42};
        truth.w_star = Vector::Zero(50);
        double magnitude = 40.0;
        for (Eigen::Index j : truth.support) {
            truth.w_star[j] = magnitude;
            magnitude /= 2.5;
        }
        ProblemInstance instance{X, X * truth.w_star, 0.0};
        const Vector w = omp(instance, 5);
        CHECK(support_of(w, 1e-10) == truth.support);
        CHECK((instance.X * w - instance.y_delta).norm() <= 1e-6);
    }
    SUBCASE("k above min(n,d) is rejected") {
        ProblemInstance instance = random_instance(4, 10, 13);
        CHECK_THROWS_AS(omp(instance, 5), std::invalid_argument);
    }
}

TEST_CASE("srdi scalar dynamics follow the correlation sign") {
    Rng rng(14);
    Matrix X(10, 1);
    for (Eigen::Index i = 0; i < 10; ++i)
        X(i, 0) = rng.normal();
    Vector w_true(1);
    w_true[0] = -2.0;
    ProblemInstance instance{X, X * w_true, 0.0};
    const double expected_sign =
        (X.transpose() * instance.y_delta)(0) > 0 ? 1.0 : -1.0;
    const SolverRun run = srdi(instance, 1.0, 0.05, 400, 1);
    bool seen_nonzero = false;
    for (const auto& [t, w] : run.snapshots) {
        if (w[0] != 0.0) {
            seen_nonzero = true;
            CHECK(w[0] * expected_sign > 0.0);
        }
    }
    CHECK(seen_nonzero);
}

TEST_CASE("irosr multiplicative dynamics") {
    ProblemInstance instance = random_instance(8, 12, 15);
    SUBCASE("zero initialization is absorbing") {
        for (const auto& [t, w] : irosr(instance, 0.05, 0.0, 50).snapshots)
            CHECK(w.norm() == 0.0);
    }
    SUBCASE("iterates are never exactly sparse for generic data") {
        const SolverRun run = irosr(instance, 0.01, 0.1, 200, 200);
        CHECK(support_of(run.final_iterate(), 0.0).size() == 12);
    }
}

TEST_CASE("ircr uses the pinned primal-dual step sizes") {
    ProblemInstance instance = random_instance(9, 14, 16);
    const double xnorm = spectral_norm(instance.X);
    const double expected_tau = 0.9 / std::sqrt(2.0 * xnorm * xnorm);
    const SolverRun run = ircr(instance, 5);
    const std::string echo = run.config_echo;
    const auto pos = echo.find("tau=");
    REQUIRE(pos != std::string::npos);
    const double tau = std::stod(echo.substr(pos + 4));
    CHECK(tau == doctest::Approx(expected_tau).epsilon(1e-12));
}

TEST_CASE("ircr converges towards a feasible l1-minimizing point") {
    Rng rng(18);
    Matrix X(10, 20);
    for (Eigen::Index i = 0; i < 10; ++i)
        for (Eigen::Index j = 0; j < 20; ++j)
            X(i, j) = rng.normal();
    Vector w_true = Vector::Zero(20);
    w_true[3] = 1.5;
    w_true[11] = -2.0;
    ProblemInstance instance{X, X * w_true, 0.0};

    const SolverRun run = ircr(instance, 6000, 6000);
    const Vector w = run.final_iterate();
    CHECK((X * w - instance.y_delta).norm() <= 1e-3);
    CHECK(w.cwiseAbs().sum() <= w_true.cwiseAbs().sum() + 1e-3);
}

TEST_CASE("dimension mismatches are rejected") {
    ProblemInstance instance;
    instance.X = Matrix::Identity(3, 3);
    instance.y_delta = Vector::Zero(2);
    IrksnConfig config;
    CHECK_THROWS_AS(irksn(instance, config), std::invalid_argument);
    CHECK_THROWS_AS(instance.validate(), std::invalid_argument);
}

TEST_CASE("irksn config validation") {
    ProblemInstance instance = random_instance(5, 8, 19);
    IrksnConfig config;
    config.k = 3;
    config.alpha = 1.0;
    CHECK_THROWS_AS(irksn(instance, config), std::invalid_argument);
    config.alpha = 0.5;
    config.max_iter = 1;
    CHECK_THROWS_AS(irksn(instance, config), std::invalid_argument);
    config.max_iter = 10;
    config.k = 9;
    CHECK_THROWS_AS(irksn(instance, config), std::invalid_argument);
}
