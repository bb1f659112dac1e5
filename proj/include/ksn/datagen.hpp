#pragma once

#include "ksn/types.hpp"

#include <cstdint>

namespace ksn {

/// Parameters of the correlated synthetic family: n i.i.d. rows of an AR(1)
/// feature process with correlation rho, a k_true-sparse Gaussian truth, and
/// Gaussian noise rescaled so that ||X w*|| / ||eps|| equals snr exactly.
struct SyntheticSpec {
    Eigen::Index n = 30;
    Eigen::Index d = 50;
    Eigen::Index k_true = 10;
    double rho = 0.5;
    double snr = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

std::pair<ProblemInstance, GroundTruth> gen_correlated(const SyntheticSpec& spec);

/// Five-feature construction with three Gaussian generating variables and
/// two features formed noiselessly from them; the target uses
/// w* = (1, 1, -4, 0, 0). Resamples (up to 100 draws) until the support
/// columns are numerically full rank.
std::pair<ProblemInstance, GroundTruth> gen_example1(std::uint64_t seed);

/// Rank-one-on-support family: rows x_i = y_i w* + gamma_i with ||w*|| = 1,
/// supp(gamma_i) disjoint from supp(w*), y_i ~ N(0,1), and gamma_i having at
/// most 3 active off-support coordinates with N(0,1) values.
std::pair<ProblemInstance, GroundTruth> gen_example2(Eigen::Index n,
                                                     Eigen::Index d,
                                                     Eigen::Index k,
                                                     std::uint64_t seed);

/// Replaces the noise of a noiseless instance: y_delta = y_clean + eps with
/// ||eps|| = delta exactly (Gaussian direction drawn from seed).
ProblemInstance with_noise_level(const ProblemInstance& instance,
                                 const GroundTruth& truth, double delta,
                                 std::uint64_t seed);

} // namespace ksn
