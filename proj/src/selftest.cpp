#include "ksn/selftest.hpp"

#include "ksn/ksupport.hpp"
#include "ksn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ksn {

namespace {

// Self-contained top-k squared norm, kept local so the oracles do not lean
// on the library routines they are meant to check.
double topk_sq(const Vector& z, Eigen::Index k) {
    std::vector<double> a(static_cast<size_t>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i)
        a[static_cast<size_t>(i)] = std::abs(z[i]);
    std::sort(a.begin(), a.end(), std::greater<double>());
    double s = 0.0;
    for (Eigen::Index i = 0; i < k; ++i)
        s += a[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];
    return s;
}

double topk_prox_objective(const Vector& z, const Vector& w, Eigen::Index k,
                           double mu) {
    return 0.5 * mu * topk_sq(z, k) + 0.5 * (z - w).squaredNorm();
}

} // namespace

Vector oracle_topk_prox(const Vector& w, Eigen::Index k, double mu) {
    const Eigen::Index d = w.size();
    if (k < 1 || k > d)
        throw std::invalid_argument("oracle_topk_prox: bad k");
    if (mu < 0.0)
        throw std::invalid_argument("oracle_topk_prox: mu must be >= 0");
    if (mu == 0.0)
        return w;

    // Magnitude-ordered view of w.
    std::vector<Eigen::Index> order(static_cast<size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) {
        return std::abs(w[i]) > std::abs(w[j]);
    });
    Vector a(d);
    for (Eigen::Index i = 0; i < d; ++i)
        a[i] = std::abs(w[order[static_cast<size_t>(i)]]);

    // The minimizer keeps signs and magnitude order: the first k sorted
    // magnitudes shrink by 1/(1+mu), the tail stays, except possibly one
    // pooled block of equal values straddling the k boundary. Enumerate all
    // block extents, evaluate the exact objective, keep the best.
    auto assemble = [&](const Vector& mags) {
        Vector z = Vector::Zero(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            const Eigen::Index j = order[static_cast<size_t>(i)];
            z[j] = w[j] >= 0.0 ? mags[i] : -mags[i];
        }
        return z;
    };

    Vector best_mags(d);
    for (Eigen::Index i = 0; i < d; ++i)
        best_mags[i] = i < k ? a[i] / (1.0 + mu) : a[i];
    Vector best = assemble(best_mags);
    double best_obj = topk_prox_objective(best, w, k, mu);

    for (Eigen::Index p = 0; p < k; ++p) {
        double block_sum = 0.0;
        for (Eigen::Index i = p; i < k; ++i)
            block_sum += a[i];
        for (Eigen::Index q = k; q < d; ++q) {
            block_sum += a[q];
            const double m1 = static_cast<double>(k - p);
            const double len = static_cast<double>(q - p + 1);
            const double v = block_sum / (mu * m1 + len);

            Vector mags(d);
            for (Eigen::Index i = 0; i < d; ++i) {
                if (i < p)
                    mags[i] = a[i] / (1.0 + mu);
                else if (i <= q)
                    mags[i] = v;
                else
                    mags[i] = a[i];
            }
            Vector z = assemble(mags);
            const double obj = topk_prox_objective(z, w, k, mu);
            if (obj < best_obj) {
                best_obj = obj;
                best = std::move(z);
            }
        }
    }
    return best;
}

Vector oracle_ksup_prox_moreau(const Vector& w, Eigen::Index k, double lambda) {
    if (lambda < 0.0)
        throw std::invalid_argument("oracle_ksup_prox_moreau: bad lambda");
    if (lambda == 0.0)
        return w;
    return w - oracle_topk_prox(w, k, 1.0 / lambda);
}

namespace {

// Value and one subgradient of 1/2 (||x||_k^sp)^2, from the sorted closed
// form: head coordinates contribute themselves, averaged-tail coordinates
// contribute sign(x_i) * mean(tail).
std::pair<double, Vector> half_sq_ksup_value_subgrad(const Vector& x,
                                                     Eigen::Index k) {
    const Eigen::Index d = x.size();
    std::vector<Eigen::Index> order(static_cast<size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) {
        return std::abs(x[i]) > std::abs(x[j]);
    });
    Vector a(d);
    for (Eigen::Index i = 0; i < d; ++i)
        a[i] = std::abs(x[order[static_cast<size_t>(i)]]);

    double tail = 0.0;
    for (Eigen::Index i = k - 1; i < d; ++i)
        tail += a[i];
    Eigen::Index lo = 0;
    double mean = tail;
    bool found = false;
    for (Eigen::Index r = 0; r < k; ++r) {
        lo = k - r - 1;
        mean = tail / static_cast<double>(r + 1);
        const double upper =
            lo == 0 ? std::numeric_limits<double>::infinity() : a[lo - 1];
        if (upper > mean && mean >= a[lo]) {
            found = true;
            break;
        }
        if (lo > 0)
            tail += a[lo - 1];
    }
    if (!found) { // roundoff tie fallback: fully averaged branch
        lo = 0;
        tail = a.sum();
        mean = tail / static_cast<double>(k);
    }

    double value = 0.0;
    Vector grad = Vector::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::Index j = order[static_cast<size_t>(i)];
        if (i < lo) {
            value += 0.5 * a[i] * a[i];
            grad[j] = x[j];
        } else if (x[j] != 0.0) {
            grad[j] = x[j] > 0.0 ? mean : -mean;
        }
    }
    value += 0.5 * mean * tail; // tail^2 / (r+1) / 2
    return {value, grad};
}

} // namespace

double ksup_prox_objective(const Vector& x, const Vector& w, Eigen::Index k,
                           double lambda) {
    return lambda * half_sq_ksup_value_subgrad(x, k).first +
           0.5 * (x - w).squaredNorm();
}

Vector oracle_ksup_prox_subgrad(const Vector& w, Eigen::Index k,
                                double lambda) {
    if (lambda == 0.0)
        return w;
    const Eigen::Index d = w.size();

    // Phase 1: subgradient descent with a geometric step decay. The
    // minimizer usually sits on a kink of the norm (sparse or tied
    // coordinates), so fixed steps oscillate at the step scale; decaying
    // steps get within ~1e-5 here.
    Vector best = w;
    double best_obj = ksup_prox_objective(best, w, k, lambda);
    {
        Vector x = w;
        for (double step = 1.0 / (1.0 + lambda); step > 1e-7; step *= 0.7) {
            for (int i = 0; i < 120; ++i) {
                const Vector sg = half_sq_ksup_value_subgrad(x, k).second;
                x -= step * (lambda * sg + (x - w));
                const double obj = ksup_prox_objective(x, w, k, lambda);
                if (obj < best_obj) {
                    best_obj = obj;
                    best = x;
                }
            }
        }
    }

    // Phase 2: exact polish. At the optimum the coordinates follow |w|'s
    // magnitude order and split into a head (stationarity of the quadratic
    // branch gives w_i / (1+lambda)), a pooled tail whose magnitudes shift
    // down by the common constant c = lambda W / ((r+1) + lambda m) with
    // W the summed tail magnitudes, and zeros. Enumerating every
    // (head size, tail size) split and scoring the true objective recovers
    // the exact minimizer regardless of where phase 1 stalled.
    std::vector<Eigen::Index> order(static_cast<size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) {
        return std::abs(w[i]) > std::abs(w[j]);
    });
    Vector a(d);
    for (Eigen::Index i = 0; i < d; ++i)
        a[i] = std::abs(w[order[static_cast<size_t>(i)]]);

    for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::Index head = k - r - 1;
        double tail_sum = 0.0;
        for (Eigen::Index m = 0; head + m <= d; ++m) {
            if (m > 0)
                tail_sum += a[head + m - 1];
            const double c = lambda * tail_sum /
                             (static_cast<double>(r + 1) +
                              lambda * static_cast<double>(m));
            Vector x = Vector::Zero(d);
            for (Eigen::Index i = 0; i < head + m && i < d; ++i) {
                const Eigen::Index j = order[static_cast<size_t>(i)];
                const double mag =
                    i < head ? a[i] / (1.0 + lambda) : a[i] - c;
                x[j] = w[j] >= 0.0 ? mag : -mag;
            }
            const double obj = ksup_prox_objective(x, w, k, lambda);
            if (obj < best_obj) {
                best_obj = obj;
                best = std::move(x);
            }
        }
    }
    return best;
}

namespace {

// Exact projection onto the top-k-norm unit ball. The Lagrangian of
// min 1/2||u - z||^2 s.t. ||u||_(k)^2 <= 1 reduces to the top-k prox with
// multiplier mu, and ||u(mu)||_(k) decreases continuously to 0, so bisection
// on mu recovers the projection.
Vector project_topk_ball(const Vector& z, Eigen::Index k) {
    if (topk_sq(z, k) <= 1.0)
        return z;
    double mu_hi = 1.0;
    while (topk_sq(oracle_topk_prox(z, k, mu_hi), k) > 1.0) {
        mu_hi *= 2.0;
        if (mu_hi > 1e300)
            throw std::runtime_error("project_topk_ball: bisection failed");
    }
    double mu_lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mu = 0.5 * (mu_lo + mu_hi);
        if (topk_sq(oracle_topk_prox(z, k, mu), k) > 1.0)
            mu_lo = mu;
        else
            mu_hi = mu;
    }
    return oracle_topk_prox(z, k, mu_hi);
}

} // namespace

double oracle_ksup_norm_dual(const Vector& w, Eigen::Index k) {
    const Eigen::Index d = w.size();
    if (k < 1 || k > d)
        throw std::invalid_argument("oracle_ksup_norm_dual: bad k");
    const double scale = w.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return 0.0;

    // Ascent step from far out: the projection of t*w maximizes
    // <w, u> - ||u||^2 / (2t) over the ball, an O(1/t) perturbation of the
    // support function, so one exact projection of a distant point suffices.
    const double t = 1e10 / scale;
    Vector u = project_topk_ball(t * w, k);
    // guarantee feasibility so the value can never exceed the true norm
    const double norm_u = std::sqrt(topk_sq(u, k));
    if (norm_u > 1.0)
        u /= norm_u;
    return u.dot(w);
}

std::string SelftestSummary::to_string() const {
    std::ostringstream os;
    os << "trials = " << trials << "\n"
       << "checks = " << checks << "\n"
       << "failures = " << failures << "\n"
       << "max_objective_gap = " << max_objective_gap << "\n"
       << "max_moreau_residual = " << max_moreau_residual << "\n"
       << "max_theta_sum_error = " << max_theta_sum_error << "\n"
       << "max_expansiveness = " << max_expansiveness << "\n"
       << "max_norm_duality_gap = " << max_norm_duality_gap << "\n"
       << "result = " << (passed() ? "pass" : "FAIL") << "\n";
    return os.str();
}

SelftestSummary prox_selftest(long trials, Eigen::Index dim_max,
                              std::uint64_t seed) {
    if (trials < 0 || dim_max < 2)
        throw std::invalid_argument("prox_selftest: need trials >= 0, dim_max >= 2");
    Rng rng(seed);
    SelftestSummary summary;
    summary.trials = trials;

    constexpr double kObjectiveTol = 1e-8;
    constexpr double kMoreauTol = 1e-8;
    constexpr double kThetaTol = 1e-9;
    constexpr double kExpansionTol = 1e-9;
    constexpr double kDualityTol = 1e-6;

    auto check = [&](bool ok) {
        ++summary.checks;
        if (!ok)
            ++summary.failures;
    };

    for (long trial = 0; trial < trials; ++trial) {
        const Eigen::Index d =
            2 + static_cast<Eigen::Index>(rng.below(std::uint64_t(dim_max - 1)));
        const Eigen::Index k =
            1 + static_cast<Eigen::Index>(rng.below(std::uint64_t(d)));
        const double lambda = trial % 7 == 0 ? 0.0 : 0.05 + 2.5 * rng.uniform();

        Vector w(d);
        for (Eigen::Index i = 0; i < d; ++i)
            w[i] = rng.normal();
        if (trial % 5 == 1) // exercise ties
            w[d - 1] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * std::abs(w[0]);
        if (trial % 5 == 2) // exercise zeros
            for (Eigen::Index i = 0; i < d; i += 2)
                w[i] = 0.0;

        const KSupProxParams params{k, lambda};
        const auto [x, profile] = prox_half_squared_ksup(w, params);

        // objective against the descent oracle
        const Vector x_sg = oracle_ksup_prox_subgrad(w, k, lambda);
        const double gap = std::abs(ksup_prox_objective(x, w, k, lambda) -
                                    ksup_prox_objective(x_sg, w, k, lambda));
        summary.max_objective_gap = std::max(summary.max_objective_gap, gap);
        check(gap <= kObjectiveTol);

        // Moreau identity through the enumeration oracle
        if (lambda > 0.0) {
            const double residual =
                (w - x - oracle_topk_prox(w, k, 1.0 / lambda)).norm();
            summary.max_moreau_residual =
                std::max(summary.max_moreau_residual, residual);
            check(residual <= kMoreauTol);
        }

        // theta budget
        const Eigen::Index nnz = (w.cwiseAbs().array() > 0.0).count();
        if (lambda > 0.0 && nnz >= k) {
            const double theta_err =
                std::abs(profile.theta.sum() - static_cast<double>(k));
            summary.max_theta_sum_error =
                std::max(summary.max_theta_sum_error, theta_err);
            check(theta_err <= kThetaTol);
        }

        // non-expansiveness
        Vector w2(d);
        for (Eigen::Index i = 0; i < d; ++i)
            w2[i] = rng.normal();
        const Vector x2 = prox_half_squared_ksup(w2, params).first;
        const double expansion = (x - x2).norm() - (w - w2).norm();
        summary.max_expansiveness =
            std::max(summary.max_expansiveness, expansion);
        check(expansion <= kExpansionTol);

        // norm duality on a subsample of small dimensions
        if (trial % 20 == 0 && d <= 8) {
            const double dual_gap =
                std::abs(ksup_norm(w, k) - oracle_ksup_norm_dual(w, k));
            summary.max_norm_duality_gap =
                std::max(summary.max_norm_duality_gap, dual_gap);
            check(dual_gap <= kDualityTol);
        }
    }
    return summary;
}

} // namespace ksn
