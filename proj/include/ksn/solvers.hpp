#pragma once

#include "ksn/ksupport.hpp"
#include "ksn/linalg.hpp"
#include "ksn/types.hpp"

#include <functional>
#include <optional>

namespace ksn {

/// Configuration of the accelerated iterative-regularization loop.
/// The solver runs exactly max_iter loop bodies, indexed t = 0..max_iter-1,
/// and snapshots w_t whenever (t+1) % record_every == 0, so a run always
/// records max_iter / record_every rows including the final iterate.
struct IrksnConfig {
    Eigen::Index k = 1;
    double alpha = 0.1;      // regularization mix, in (0,1)
    double gamma = 0.0;      // dual step; 0 selects alpha * ||X||^-2
    long max_iter = 1000;    // T
    long record_every = 1;
    MatrixNormChoice norm_choice = MatrixNormChoice::spectral;

    void validate(const ProblemInstance& instance) const;
};

/// Internal state handed to observers once per iteration, after the
/// iteration's updates. theta is the momentum value theta_{t+1}.
struct SolverState {
    const Vector& w_hat;
    const Vector& v_hat;
    const Vector& z_hat;
    const Vector& z_prev;
    double theta;
    long t;
};

using SolverObserver = std::function<void(const SolverState&)>;

/// Accelerated dual iteration for min R(w) s.t. Xw = y_delta with
/// R = ((1-alpha)/2)(||.||_k^sp)^2 + (alpha/2)||.||^2. Per iteration:
///   r_t = prox_{alpha^-1 F}(-alpha^-1 X^T v_t)
///   z_t = v_t + gamma (X r_t - y_delta)
///   w_t = prox_{alpha^-1 F}(-alpha^-1 X^T z_t)
///   theta_{t+1} = (1 + sqrt(1 + 4 theta_t^2)) / 2,  theta_0 = 1
///   v_{t+1} = z_t + ((theta_t - 1)/theta_{t+1}) (z_t - z_{t-1})
/// Dual variables start at 0 in R^n. Early stopping (choosing which w_t to
/// keep) is the caller's business; the run records the whole trajectory.
SolverRun irksn(const ProblemInstance& instance, const IrksnConfig& config,
                const SolverObserver& observer = nullptr);

/// Iterative hard thresholding: w <- HT_k(w - eta X^T (Xw - y_delta)).
SolverRun iht(const ProblemInstance& instance, Eigen::Index k, double eta,
              long max_iter, long record_every = 1);

struct PathPoint {
    double lambda = 0.0;
    double l1_ratio = 1.0;
    Vector w;
    long inner_iterations = 0;
    bool converged = true;
};

/// 100 geometrically spaced values from lambda_max = ||X^T y_delta||_inf
/// (the null-solution threshold under the 1/2-scaled loss) down to
/// lambda_max * 1e-3.
std::vector<double> default_lambda_grid(const ProblemInstance& instance,
                                        int count = 100,
                                        double min_ratio = 1e-3);

/// Proximal-gradient solutions of min 1/2||Xw - y_delta||^2 + lambda||w||_1
/// for each lambda, warm-starting down the (decreasing) grid. Inner loop:
/// step 1/||X||^2, stop when the iterate moves less than 1e-8 in l-inf,
/// give up (converged = false) after 10000 inner iterations.
std::vector<PathPoint> lasso_path(const ProblemInstance& instance,
                                  const std::vector<double>& lambda_grid);

/// As lasso_path with penalty lambda (ratio ||w||_1 + (1-ratio)/2 ||w||^2),
/// for every (ratio, lambda) combination.
std::vector<PathPoint> elasticnet_path(const ProblemInstance& instance,
                                       const std::vector<double>& lambda_grid,
                                       const std::vector<double>& l1_ratios);

/// Proximal gradient on 1/2||Xw - y_delta||^2 + (lambda/2)(||w||_k^sp)^2
/// with step 1/L.
SolverRun ksn_penalized(const ProblemInstance& instance, Eigen::Index k,
                        double lambda, double L, long max_iter,
                        long record_every = 1);

/// Orthogonal matching pursuit: k rounds of max-|correlation| atom selection
/// with a pseudo-inverse least-squares refit on the selected support.
Vector omp(const ProblemInstance& instance, Eigen::Index k);

/// Linearized Bregman / inverse-scale-space dynamics for l1 recovery:
///   z <- z - alpha_srdi X^T (Xw - y_delta);  w <- kappa soft(z, 1).
SolverRun srdi(const ProblemInstance& instance, double kappa,
               double alpha_srdi, long max_iter, long record_every = 1);

/// Hadamard-reparameterized gradient descent, w = u.*u - v.*v, with
/// multiplicative updates u <- u.*(1 - eta g), v <- v.*(1 + eta g) where
/// g = X^T (Xw - y_delta), starting from u = v = alpha_init * ones.
SolverRun irosr(const ProblemInstance& instance, double eta,
                double alpha_init, long max_iter, long record_every = 1);

/// Primal-dual (Chambolle-Pock) iteration for min ||w||_1 s.t. Xw = y_delta
/// with tau = sigma = 0.9 / sqrt(2 ||X||^2):
///   w+ = soft(w - tau X^T v, tau);  v+ = v + sigma (X (2w+ - w) - y_delta).
SolverRun ircr(const ProblemInstance& instance, long max_iter,
               long record_every = 1);

} // namespace ksn
