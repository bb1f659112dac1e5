#include "ksn/ksupport.hpp"
#include "ksn/rng.hpp"
#include "ksn/selftest.hpp"

#include <doctest.h>

#include <cmath>

using namespace ksn;

namespace {

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values)
        v[i++] = x;
    return v;
}

} // namespace

TEST_CASE("topk_norm on small vectors") {
    const Vector w = vec({3, -1, 2});
    CHECK(topk_norm(w, 2) == doctest::Approx(std::sqrt(13.0)).epsilon(1e-12));
    CHECK(topk_norm(w, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(topk_norm(w, 3) == doctest::Approx(std::sqrt(14.0)).epsilon(1e-12));
    CHECK_THROWS_AS(topk_norm(w, 0), std::invalid_argument);
    CHECK_THROWS_AS(topk_norm(w, 4), std::invalid_argument);
}

TEST_CASE("hard_threshold keeps k largest, lowest index wins ties") {
    CHECK(hard_threshold(vec({2, 1}), 1) == vec({2, 0}));
    CHECK(hard_threshold(vec({2, 2}), 1) == vec({2, 0}));
    CHECK(hard_threshold(vec({1, 2, 3}), 3) == vec({1, 2, 3}));
    CHECK(hard_threshold(vec({-1, 2, -3}), 2) == vec({0, 2, -3}));
    CHECK_THROWS_AS(hard_threshold(vec({1, 2}), 3), std::invalid_argument);
}

TEST_CASE("ksup_norm limit cases") {
    const Vector w = vec({1, -2});
    CHECK(ksup_norm(w, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(ksup_norm(w, 2) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK_THROWS_AS(ksup_norm(w, 0), std::invalid_argument);
}

TEST_CASE("ksup_norm derived value matches the dual-norm oracle") {
    const Vector w = vec({3, 1, 0.5});
    // frozen from the sorted closed form, confirmed by the oracle below:
    // head {3}, averaged tail {1, 0.5} => sqrt(9 + 1.5^2) = sqrt(11.25)
    const double frozen = std::sqrt(11.25);
    CHECK(ksup_norm(w, 2) == doctest::Approx(frozen).epsilon(1e-12));
    CHECK(oracle_ksup_norm_dual(w, 2) == doctest::Approx(frozen).epsilon(1e-6));
}

TEST_CASE("ksup_norm interpolates between l1 and l2") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index d = 2 + Eigen::Index(rng.below(15));
        Vector w(d);
        for (Eigen::Index i = 0; i < d; ++i)
            w[i] = rng.normal();
        if (trial % 4 == 0)
            w[0] = 0.0;
        const double l1 = w.cwiseAbs().sum();
        const double l2 = w.norm();
        CHECK(ksup_norm(w, 1) == doctest::Approx(l1).epsilon(1e-10));
        CHECK(ksup_norm(w, d) == doctest::Approx(l2).epsilon(1e-10));
        for (Eigen::Index k = 1; k <= d; ++k) {
            const double value = ksup_norm(w, k);
            CHECK(value >= l2 - 1e-10);
            CHECK(value <= l1 + 1e-10);
        }
    }
}

TEST_CASE("ksup_norm agrees with the dual oracle on random inputs") {
    Rng rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const Eigen::Index d = 2 + Eigen::Index(rng.below(7)); // d <= 8
        const Eigen::Index k = 1 + Eigen::Index(rng.below(std::uint64_t(d)));
        Vector w(d);
        for (Eigen::Index i = 0; i < d; ++i)
            w[i] = rng.normal();
        CHECK(ksup_norm(w, k) ==
              doctest::Approx(oracle_ksup_norm_dual(w, k)).epsilon(1e-6));
    }
}

TEST_CASE("prox trivial cases") {
    SUBCASE("lambda = 0 is the identity") {
        const Vector w = vec({0.3, -2, 5, 0});
        const auto [x, profile] = prox_half_squared_ksup(w, {2, 0.0});
        CHECK(x == w);
    }
    SUBCASE("k = d shrinks by 1/(1+lambda)") {
        const auto [x, profile] = prox_half_squared_ksup(vec({2, 4}), {2, 1.0});
        CHECK(x == vec({1, 2}));
        CHECK(profile.theta == vec({1, 1}));
    }
    SUBCASE("zero input returns zero with zero theta") {
        const auto [x, profile] = prox_half_squared_ksup(vec({0, 0, 0}), {2, 0.7});
        CHECK(x == vec({0, 0, 0}));
        CHECK(profile.theta == vec({0, 0, 0}));
    }
    SUBCASE("invalid params throw") {
        CHECK_THROWS_AS(prox_half_squared_ksup(vec({1, 2}), {0, 1.0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(prox_half_squared_ksup(vec({1, 2}), {1, -0.5}),
                        std::invalid_argument);
    }
}

TEST_CASE("prox derived value, KKT objective, and Moreau identity") {
    const Vector w = vec({3, 1, 0.5});
    const KSupProxParams params{2, 0.5};
    const auto [x, profile] = prox_half_squared_ksup(w, params);

    // frozen from the oracles: alpha* = 4/3, theta = (1, 5/6, 1/6)
    CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(0.625).epsilon(1e-12));
    CHECK(x[2] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(profile.theta.sum() == doctest::Approx(2.0).epsilon(1e-12));

    const Vector x_oracle = oracle_ksup_prox_subgrad(w, 2, 0.5);
    const double gap = std::abs(ksup_prox_objective(x, w, 2, 0.5) -
                                ksup_prox_objective(x_oracle, w, 2, 0.5));
    CHECK(gap <= 1e-8);

    const Vector moreau = oracle_ksup_prox_moreau(w, 2, 0.5);
    CHECK((x - moreau).norm() <= 1e-10);
}

TEST_CASE("prox_irksn_regularizer") {
    const Vector u = vec({3, 1, 0.5});
    SUBCASE("alpha near 1 is nearly the identity") {
        const Vector x = prox_irksn_regularizer(u, 2, 1.0 - 1e-12);
        CHECK((x - u).norm() <= 1e-9);
    }
    SUBCASE("k = d, alpha = 1/2 halves the input") {
        const Vector x = prox_irksn_regularizer(u, 3, 0.5);
        CHECK((x - 0.5 * u).norm() <= 1e-12);
    }
    SUBCASE("derived value at alpha = 1/2 (lambda = 1)") {
        const Vector x = prox_irksn_regularizer(u, 2, 0.5);
        CHECK(x[0] == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(x[2] == doctest::Approx(0.0));
        const Vector moreau = oracle_ksup_prox_moreau(u, 2, 1.0);
        CHECK((x - moreau).norm() <= 1e-10);
    }
    SUBCASE("alpha outside (0,1) throws") {
        CHECK_THROWS_AS(prox_irksn_regularizer(u, 2, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(prox_irksn_regularizer(u, 2, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(prox_irksn_regularizer(u, 2, 10.0), std::invalid_argument);
    }
}

TEST_CASE("prox is non-expansive") {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index d = 2 + Eigen::Index(rng.below(19));
        const Eigen::Index k = 1 + Eigen::Index(rng.below(std::uint64_t(d)));
        const double lambda = 2.5 * rng.uniform();
        Vector w1(d), w2(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            w1[i] = rng.normal();
            w2[i] = rng.normal();
        }
        const KSupProxParams params{k, lambda};
        const Vector x1 = prox_half_squared_ksup(w1, params).first;
        const Vector x2 = prox_half_squared_ksup(w2, params).first;
        CHECK((x1 - x2).norm() <= (w1 - w2).norm() + 1e-9);
    }
}

TEST_CASE("theta sums to k whenever w has at least k nonzeros") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index d = 2 + Eigen::Index(rng.below(12));
        const Eigen::Index k = 1 + Eigen::Index(rng.below(std::uint64_t(d)));
        const double lambda = 0.05 + 2.0 * rng.uniform();
        Vector w(d);
        for (Eigen::Index i = 0; i < d; ++i)
            w[i] = rng.normal();
        const auto [x, profile] = prox_half_squared_ksup(w, {k, lambda});
        CHECK(std::abs(profile.theta.sum() - double(k)) <= 1e-9);
        for (Eigen::Index i = 0; i < d; ++i) {
            CHECK(profile.theta[i] >= 0.0);
            CHECK(profile.theta[i] <= 1.0);
        }
        for (size_t i = 1; i < profile.breakpoints.size(); ++i)
            CHECK(profile.breakpoints[i] >= profile.breakpoints[i - 1]);
    }
}

TEST_CASE("prox support approaches hard thresholding as alpha -> 0") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index d = 4 + Eigen::Index(rng.below(8));
        const Eigen::Index k = 1 + Eigen::Index(rng.below(std::uint64_t(d - 1)));
        Vector u(d);
        for (Eigen::Index i = 0; i < d; ++i)
            u[i] = rng.normal();
        const Vector ht = hard_threshold(u, k);
        const Vector x = prox_irksn_regularizer(u, k, 1e-7);
        for (Eigen::Index i = 0; i < d; ++i) {
            const bool ht_active = ht[i] != 0.0;
            const bool prox_active = std::abs(x[i]) > 1e-14;
            CHECK(ht_active == prox_active);
        }
    }
}

TEST_CASE("randomized prox battery passes") {
    const SelftestSummary summary = prox_selftest(120, 12, 2024);
    CHECK(summary.failures == 0);
    CHECK(summary.checks > 0);
}

TEST_CASE("selftest with zero trials passes trivially") {
    const SelftestSummary summary = prox_selftest(0, 12, 1);
    CHECK(summary.trials == 0);
    CHECK(summary.checks == 0);
    CHECK(summary.passed());
}
