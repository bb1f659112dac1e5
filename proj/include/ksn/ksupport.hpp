#pragma once

#include "ksn/types.hpp"

namespace ksn {

/// Parameters of the proximal operator of the half-squared k-support norm,
/// prox_{(lambda/2) (||.||_k^sp)^2}.
struct KSupProxParams {
    Eigen::Index k = 1;
    double lambda = 0.0;

    void validate(Eigen::Index dim) const;
};

/// Diagnostics of one prox evaluation. theta is the water-filling weight
/// vector: theta_i = min(1, max(0, alpha_star*|w_i| - lambda)), and the
/// output is x_i = theta_i * w_i / (theta_i + lambda). Whenever w has at
/// least k nonzeros and lambda > 0, sum(theta) == k.
struct ThresholdProfile {
    std::vector<double> breakpoints; // sorted, 2 per nonzero entry of w
    double alpha_star = 0.0;
    Vector theta;
};

/// l2 norm of the k largest-magnitude entries of w.
double topk_norm(const Vector& w, Eigen::Index k);

/// Keep the k largest-magnitude entries of z, zero the rest. Ties are broken
/// towards the lowest index, so the result is one canonical element of the
/// (possibly non-singleton) set of minimizers.
Vector hard_threshold(const Vector& z, Eigen::Index k);

/// k-support norm: the gauge of the convex hull of k-sparse unit-l2 vectors.
/// Interpolates between l1 (k=1) and l2 (k=d). Evaluated by the sorted
/// closed form in O(d log d).
double ksup_norm(const Vector& w, Eigen::Index k);

/// prox_{(lambda/2)(||.||_k^sp)^2}(w), via breakpoint sort + binary search +
/// linear interpolation of the root of S(alpha) = sum_i theta_i(alpha) = k.
std::pair<Vector, ThresholdProfile> prox_half_squared_ksup(
    const Vector& w, const KSupProxParams& params);

/// Primal projection step of the iterative-regularization loop:
/// prox_{alpha^-1 F}(u) with F = ((1-alpha)/2)(||.||_k^sp)^2, which reduces
/// to prox_half_squared_ksup with lambda = (1-alpha)/alpha.
Vector prox_irksn_regularizer(const Vector& u, Eigen::Index k, double alpha);

} // namespace ksn
