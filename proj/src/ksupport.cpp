#include "ksn/ksupport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ksn {

namespace {

void check_k(Eigen::Index k, Eigen::Index dim) {
    if (k < 1 || k > dim)
        throw std::invalid_argument("k must satisfy 1 <= k <= dim, got k=" +
                                    std::to_string(k) + ", dim=" +
                                    std::to_string(dim));
}

// Indices of the k largest |z_i|, stable in the original index order so that
// ties resolve towards the lowest index.
std::vector<Eigen::Index> topk_indices(const Vector& z, Eigen::Index k) {
    std::vector<Eigen::Index> idx(static_cast<size_t>(z.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                         return std::abs(z[a]) > std::abs(z[b]);
                     });
    idx.resize(static_cast<size_t>(k));
    return idx;
}

// S(alpha) = sum_i min(1, max(0, alpha*|w_i| - lambda)), nondecreasing and
// piecewise linear with kinks at the breakpoints.
double waterfill_sum(const Vector& abs_w, double alpha, double lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < abs_w.size(); ++i)
        s += std::min(1.0, std::max(0.0, alpha * abs_w[i] - lambda));
    return s;
}

} // namespace

void KSupProxParams::validate(Eigen::Index dim) const {
    check_k(k, dim);
    if (!(lambda >= 0.0))
        throw std::invalid_argument("lambda must be >= 0");
}

double topk_norm(const Vector& w, Eigen::Index k) {
    check_k(k, w.size());
    double sumsq = 0.0;
    for (Eigen::Index i : topk_indices(w, k))
        sumsq += w[i] * w[i];
    return std::sqrt(sumsq);
}

Vector hard_threshold(const Vector& z, Eigen::Index k) {
    check_k(k, z.size());
    Vector out = Vector::Zero(z.size());
    for (Eigen::Index i : topk_indices(z, k))
        out[i] = z[i];
    return out;
}

double ksup_norm(const Vector& w, Eigen::Index k) {
    check_k(k, w.size());
    const Eigen::Index d = w.size();
    Vector a = w.cwiseAbs();
    std::sort(a.data(), a.data() + d, std::greater<double>());

    // Sorted closed form: with |w| sorted descending, find the unique
    // r in {0,...,k-1} such that
    //   a[k-r-2] > (1/(r+1)) * sum_{i >= k-r-1} a[i] >= a[k-r-1]
    // (0-based; the left guard is +inf when k-r-1 == 0), then
    //   ||w||_k^sp = sqrt( sum_{i < k-r-1} a_i^2 + tail^2/(r+1) ).
    double tail = 0.0;
    for (Eigen::Index i = k - 1; i < d; ++i)
        tail += a[i];
    for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::Index lo = k - r - 1; // first index of the averaged tail
        const double mean = tail / static_cast<double>(r + 1);
        const double upper = (lo == 0) ? std::numeric_limits<double>::infinity()
                                       : a[lo - 1];
        if (upper > mean && mean >= a[lo]) {
            double head_sq = 0.0;
            for (Eigen::Index i = 0; i < lo; ++i)
                head_sq += a[i] * a[i];
            return std::sqrt(head_sq + tail * tail / static_cast<double>(r + 1));
        }
        if (lo > 0)
            tail += a[lo - 1];
    }
    // r = k-1 always satisfies the bracket in exact arithmetic; guard against
    // roundoff on heavily tied inputs by falling back to it.
    double total = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
        total += a[i];
    return std::sqrt(total * total / static_cast<double>(k));
}

std::pair<Vector, ThresholdProfile> prox_half_squared_ksup(
    const Vector& w, const KSupProxParams& params) {
    params.validate(w.size());
    const Eigen::Index d = w.size();
    const double lambda = params.lambda;
    const Eigen::Index k = params.k;

    ThresholdProfile profile;
    profile.theta = Vector::Zero(d);

    if (lambda == 0.0)
        return {w, profile}; // prox of the zero function

    const Vector abs_w = w.cwiseAbs();
    const Eigen::Index nnz = (abs_w.array() > 0.0).count();

    if (nnz == 0)
        return {Vector::Zero(d), profile};

    if (nnz <= k) {
        // The budget constraint sum(theta) <= k is slack: every nonzero
        // saturates at theta = 1 and the prox is the plain l2 shrinkage.
        for (Eigen::Index i = 0; i < d; ++i)
            profile.theta[i] = abs_w[i] > 0.0 ? 1.0 : 0.0;
        profile.alpha_star = std::numeric_limits<double>::infinity();
        return {w / (1.0 + lambda), profile};
    }

    // Breakpoints of S(alpha): each nonzero entry contributes the alphas at
    // which its theta_i leaves 0 and hits 1.
    auto& bp = profile.breakpoints;
    bp.reserve(static_cast<size_t>(2 * nnz));
    for (Eigen::Index j = 0; j < d; ++j) {
        if (abs_w[j] > 0.0) {
            bp.push_back(lambda / abs_w[j]);
            bp.push_back((1.0 + lambda) / abs_w[j]);
        }
    }
    std::stable_sort(bp.begin(), bp.end());

    // Binary search for consecutive breakpoints bracketing S(alpha) = k.
    // S is 0 at bp.front() or below and equals nnz >= k at bp.back().
    const double target = static_cast<double>(k);
    size_t lo = 0, hi = bp.size() - 1;
    while (hi - lo > 1) {
        const size_t mid = (lo + hi) / 2;
        if (waterfill_sum(abs_w, bp[mid], lambda) < target)
            lo = mid;
        else
            hi = mid;
    }

    const double s_lo = waterfill_sum(abs_w, bp[lo], lambda);
    const double s_hi = waterfill_sum(abs_w, bp[hi], lambda);
    double alpha_star;
    if (s_hi > s_lo) {
        alpha_star = bp[lo] + (target - s_lo) * (bp[hi] - bp[lo]) / (s_hi - s_lo);
    } else {
        // S is flat at k across the bracket; any root gives the same theta,
        // take the midpoint for determinism.
        alpha_star = 0.5 * (bp[lo] + bp[hi]);
    }

    profile.alpha_star = alpha_star;
    Vector x(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double th =
            std::min(1.0, std::max(0.0, alpha_star * abs_w[i] - lambda));
        profile.theta[i] = th;
        x[i] = th * w[i] / (th + lambda);
    }
    return {x, profile};
}

Vector prox_irksn_regularizer(const Vector& u, Eigen::Index k, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1), got " +
                                    std::to_string(alpha));
    KSupProxParams params{k, (1.0 - alpha) / alpha};
    return prox_half_squared_ksup(u, params).first;
}

} // namespace ksn
