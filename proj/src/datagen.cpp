#include "ksn/datagen.hpp"

#include "ksn/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace ksn {

namespace {

// Sorted support of size k drawn uniformly at random (Fisher-Yates prefix).
IndexSet random_support(Rng& rng, Eigen::Index d, Eigen::Index k) {
    std::vector<Eigen::Index> idx(static_cast<size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i)
        idx[static_cast<size_t>(i)] = i;
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto j = i + static_cast<Eigen::Index>(
                               rng.below(static_cast<std::uint64_t>(d - i)));
        std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    }
    IndexSet support(idx.begin(), idx.begin() + k);
    std::sort(support.begin(), support.end());
    return support;
}

double smallest_singular_value(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& sigma = svd.singularValues();
    return sigma.size() > 0 ? sigma(sigma.size() - 1) : 0.0;
}

} // namespace

void SyntheticSpec::validate() const {
    if (n < 1 || d < 1)
        throw std::invalid_argument("SyntheticSpec: n and d must be >= 1");
    if (k_true < 1 || k_true > d)
        throw std::invalid_argument("SyntheticSpec: need 1 <= k_true <= d");
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("SyntheticSpec: need 0 <= rho < 1");
    if (!(snr > 0.0))
        throw std::invalid_argument("SyntheticSpec: snr must be positive");
}

std::pair<ProblemInstance, GroundTruth> gen_correlated(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    // AR(1) features per row: X_1 ~ N(0,1), X_{j+1} = rho X_j + sigma Delta
    // with sigma^2 = 1 - rho^2, which keeps unit variance and gives
    // E[X_i X_j] = rho^{|i-j|}.
    Matrix X(spec.n, spec.d);
    const double sigma = std::sqrt(1.0 - spec.rho * spec.rho);
    for (Eigen::Index i = 0; i < spec.n; ++i) {
        X(i, 0) = rng.normal();
        for (Eigen::Index j = 1; j < spec.d; ++j)
            X(i, j) = spec.rho * X(i, j - 1) + sigma * rng.normal();
    }

    GroundTruth truth;
    truth.support = random_support(rng, spec.d, spec.k_true);
    truth.w_star = Vector::Zero(spec.d);
    for (Eigen::Index j : truth.support)
        truth.w_star[j] = rng.normal();
    truth.y_clean = X * truth.w_star;

    Vector eps(spec.n);
    for (Eigen::Index i = 0; i < spec.n; ++i)
        eps[i] = rng.normal();
    const double scale = truth.y_clean.norm() / (spec.snr * eps.norm());
    eps *= scale;

    ProblemInstance instance;
    instance.X = std::move(X);
    instance.y_delta = truth.y_clean + eps;
    instance.delta = eps.norm();
    return {std::move(instance), std::move(truth)};
}

std::pair<ProblemInstance, GroundTruth> gen_example1(std::uint64_t seed) {
    Vector w3(3), w4(3), wy(3);
    w3 << 9.0 / 11.0, 6.0 / 11.0, 2.0 / 11.0;
    w4 << 1.0 / 3.0, 14.0 / 15.0, 2.0 / 15.0;
    wy << 1.0, 1.0, -4.0;

    constexpr int kMaxAttempts = 100;
    constexpr double kMinSingular = 1e-6;
    Rng rng(seed);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Matrix G(4, 3);
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 3; ++j)
                G(i, j) = rng.normal();
        if (smallest_singular_value(G) <= kMinSingular)
            continue;

        Matrix X(4, 5);
        X.leftCols(3) = G;
        X.col(3) = G * w3;
        X.col(4) = G * w4;

        GroundTruth truth;
        truth.w_star = Vector::Zero(5);
        truth.w_star.head(3) = wy;
        truth.support = {0, 1, 2};
        truth.y_clean = G * wy;

        ProblemInstance instance;
        instance.X = std::move(X);
        instance.y_delta = truth.y_clean;
        instance.delta = 0.0;
        return {std::move(instance), std::move(truth)};
    }
    throw std::runtime_error(
        "gen_example1: no full-rank draw in 100 attempts");
}

std::pair<ProblemInstance, GroundTruth> gen_example2(Eigen::Index n,
                                                     Eigen::Index d,
                                                     Eigen::Index k,
                                                     std::uint64_t seed) {
    if (n < 1 || k < 1 || k >= d)
        throw std::invalid_argument("gen_example2: need n >= 1, 1 <= k < d");
    Rng rng(seed);

    GroundTruth truth;
    truth.support = random_support(rng, d, k);
    truth.w_star = Vector::Zero(d);
    // Random signs with magnitudes bounded away from zero (uniform in
    // [0.75, 1.25] before normalization): the off-support concentration
    // argument needs the smallest nonzero |w*_j| to stay comparable to the
    // largest.
    double norm_sq = 0.0;
    for (Eigen::Index j : truth.support) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        truth.w_star[j] = sign * (0.75 + 0.5 * rng.uniform());
        norm_sq += truth.w_star[j] * truth.w_star[j];
    }
    truth.w_star /= std::sqrt(norm_sq);

    IndexSet off_support;
    {
        std::vector<bool> in_s(static_cast<size_t>(d), false);
        for (Eigen::Index j : truth.support)
            in_s[static_cast<size_t>(j)] = true;
        for (Eigen::Index j = 0; j < d; ++j)
            if (!in_s[static_cast<size_t>(j)])
                off_support.push_back(j);
    }

    Vector y(n);
    Matrix X = Matrix::Zero(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        y[i] = rng.normal();
        X.row(i) = y[i] * truth.w_star.transpose();
        // gamma_i: up to 3 active coordinates outside the support
        const auto m = 1 + rng.below(3);
        for (std::uint64_t a = 0; a < m; ++a) {
            const Eigen::Index j = off_support[static_cast<size_t>(
                rng.below(off_support.size()))];
            X(i, j) += rng.normal();
        }
    }
    truth.y_clean = y;

    ProblemInstance instance;
    instance.X = std::move(X);
    instance.y_delta = std::move(y);
    instance.delta = 0.0;
    return {std::move(instance), std::move(truth)};
}

ProblemInstance with_noise_level(const ProblemInstance& instance,
                                 const GroundTruth& truth, double delta,
                                 std::uint64_t seed) {
    if (delta < 0.0)
        throw std::invalid_argument("with_noise_level: delta must be >= 0");
    ProblemInstance noisy = instance;
    noisy.delta = delta;
    noisy.y_delta = truth.y_clean;
    if (delta > 0.0) {
        Rng rng(seed);
        Vector eps(instance.n());
        for (Eigen::Index i = 0; i < instance.n(); ++i)
            eps[i] = rng.normal();
        noisy.y_delta += (delta / eps.norm()) * eps;
    }
    return noisy;
}

} // namespace ksn
