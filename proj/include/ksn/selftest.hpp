#pragma once

#include "ksn/types.hpp"

#include <cstdint>
#include <string>

namespace ksn {

/// Independent reference routines for the k-support machinery. None of them
/// share code with the production prox path: the top-k prox is an exact
/// candidate enumeration, the k-support prox follows from it through the
/// Moreau identity, and the norm check maximizes over the dual ball by
/// projected ascent with Dykstra projections. They exist to cross-examine
/// the closed forms, so keep them boring and slow.

/// Exact prox of (mu/2) ||.||_(k)^2 (half-squared top-k norm) by enumerating
/// the pooled-block candidates of the magnitude-ordered solution.
Vector oracle_topk_prox(const Vector& w, Eigen::Index k, double mu);

/// prox of (lambda/2)(||.||_k^sp)^2 via the Moreau identity
/// w = prox_f(w) + prox_{f*}(w) with f* = (1/(2 lambda)) ||.||_(k)^2.
Vector oracle_ksup_prox_moreau(const Vector& w, Eigen::Index k, double lambda);

/// Same prox by descent on the strongly convex objective
/// (lambda/2)(||x||_k^sp)^2 + 1/2||x - w||^2, run from several starts until
/// the objective stops moving. Returns the best iterate found.
Vector oracle_ksup_prox_subgrad(const Vector& w, Eigen::Index k, double lambda);

/// Objective value (lambda/2)(||x||_k^sp)^2 + 1/2||x - w||^2.
double ksup_prox_objective(const Vector& x, const Vector& w, Eigen::Index k,
                           double lambda);

/// k-support norm as max <u, w> over the unit ball of the top-k norm,
/// by projected gradient ascent (Dykstra projection over all C(d,k)
/// restrictions). Intended for d <= 8.
double oracle_ksup_norm_dual(const Vector& w, Eigen::Index k);

struct SelftestSummary {
    long trials = 0;
    long checks = 0;
    long failures = 0;
    double max_objective_gap = 0.0;
    double max_moreau_residual = 0.0;
    double max_theta_sum_error = 0.0;
    double max_expansiveness = 0.0; // max of ||dprox|| - ||dw||, <= 0 if fine
    double max_norm_duality_gap = 0.0;

    bool passed() const { return failures == 0; }
    std::string to_string() const;
};

/// Randomized battery: for each trial draws (d, w, k, lambda) with
/// d <= dim_max, runs the production prox and norms against the oracles and
/// the invariants (objective gap <= 1e-8, Moreau residual <= 1e-8, theta sum
/// = k +- 1e-9, non-expansiveness, norm duality within 1e-6 on a subsample).
SelftestSummary prox_selftest(long trials, Eigen::Index dim_max,
                              std::uint64_t seed);

} // namespace ksn
