#include "ksn/solvers.hpp"

#include <cmath>
#include <sstream>

namespace ksn {

namespace {

constexpr double kSparsityTol = 1e-8;

Eigen::Index nnz_at(const Vector& w, double tol) {
    return (w.cwiseAbs().array() > tol).count();
}

void record(SolverRun& run, long t, long record_every, const Vector& w,
            const Vector& residual) {
    if ((t + 1) % record_every != 0)
        return;
    run.snapshots.emplace_back(t, w);
    run.metrics.push_back({t, residual.norm(), nnz_at(w, kSparsityTol)});
}

void check_finite(const std::string& solver, const Vector& w, long t) {
    if (!w.allFinite())
        throw DivergenceError(solver, t);
}

Vector soft_threshold(const Vector& z, double tau) {
    return z.unaryExpr([tau](double v) {
        return v > tau ? v - tau : (v < -tau ? v + tau : 0.0);
    });
}

std::string echo(std::initializer_list<std::pair<const char*, double>> kv) {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [key, value] : kv) {
        os << (first ? "" : " ") << key << "=" << value;
        first = false;
    }
    return os.str();
}

} // namespace

void IrksnConfig::validate(const ProblemInstance& instance) const {
    instance.validate();
    if (k < 1 || k > instance.d())
        throw std::invalid_argument("irksn: k must satisfy 1 <= k <= d");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("irksn: alpha must lie in (0,1)");
    if (gamma < 0.0)
        throw std::invalid_argument("irksn: gamma must be positive (or 0 for default)");
    if (max_iter < 2)
        throw std::invalid_argument("irksn: max_iter must be >= 2");
    if (record_every < 1)
        throw std::invalid_argument("irksn: record_every must be >= 1");
}

SolverRun irksn(const ProblemInstance& instance, const IrksnConfig& config,
                const SolverObserver& observer) {
    config.validate(instance);
    const Matrix& X = instance.X;
    const Vector& y = instance.y_delta;
    const double alpha = config.alpha;
    double gamma = config.gamma;
    if (gamma == 0.0) {
        const double xnorm = matrix_norm(X, config.norm_choice);
        if (xnorm == 0.0)
            throw std::invalid_argument("irksn: X is zero, cannot derive gamma");
        gamma = alpha / (xnorm * xnorm);
    }

    SolverRun run;
    run.solver = "irksn";
    run.config_echo = echo({{"k", double(config.k)},
                            {"alpha", alpha},
                            {"gamma", gamma},
                            {"T", double(config.max_iter)},
                            {"record_every", double(config.record_every)}});

    const Eigen::Index n = instance.n();
    Vector v = Vector::Zero(n);
    Vector z_prev = Vector::Zero(n);
    double theta = 1.0;

    for (long t = 0; t < config.max_iter; ++t) {
        Vector r = prox_irksn_regularizer(-(X.transpose() * v) / alpha,
                                          config.k, alpha);
        Vector z = v + gamma * (X * r - y);
        Vector w = prox_irksn_regularizer(-(X.transpose() * z) / alpha,
                                          config.k, alpha);
        const double theta_next = (1.0 + std::sqrt(1.0 + 4.0 * theta * theta)) / 2.0;
        Vector v_next = z + ((theta - 1.0) / theta_next) * (z - z_prev);

        check_finite("irksn", w, t);
        check_finite("irksn", v_next, t);

        if (observer)
            observer(SolverState{w, v_next, z, z_prev, theta_next, t});
        record(run, t, config.record_every, w, X * w - y);

        z_prev = std::move(z);
        v = std::move(v_next);
        theta = theta_next;
    }
    return run;
}

SolverRun iht(const ProblemInstance& instance, Eigen::Index k, double eta,
              long max_iter, long record_every) {
    instance.validate();
    if (k < 1 || k > instance.d())
        throw std::invalid_argument("iht: k must satisfy 1 <= k <= d");
    if (!(eta > 0.0))
        throw std::invalid_argument("iht: eta must be positive");

    SolverRun run;
    run.solver = "iht";
    run.config_echo = echo({{"k", double(k)}, {"eta", eta}, {"T", double(max_iter)}});

    const Matrix& X = instance.X;
    const Vector& y = instance.y_delta;
    Vector w = Vector::Zero(instance.d());
    for (long t = 0; t < max_iter; ++t) {
        Vector residual = X * w - y;
        w = hard_threshold(w - eta * (X.transpose() * residual), k);
        check_finite("iht", w, t);
        record(run, t, record_every, w, X * w - y);
    }
    return run;
}

std::vector<double> default_lambda_grid(const ProblemInstance& instance,
                                        int count, double min_ratio) {
    instance.validate();
    const double lambda_max =
        (instance.X.transpose() * instance.y_delta).cwiseAbs().maxCoeff();
    std::vector<double> grid(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double frac = count > 1 ? double(i) / double(count - 1) : 0.0;
        grid[static_cast<size_t>(i)] = lambda_max * std::pow(min_ratio, frac);
    }
    return grid;
}

namespace {

constexpr long kPathMaxInner = 10000;
constexpr double kPathTol = 1e-8;

// One proximal-gradient solve of
//   1/2 ||Xw - y||^2 + l2_term/2 ||w||^2 + l1_term ||w||_1
// from the warm start in/out parameter w.
PathPoint solve_penalized_l1(const Matrix& X, const Vector& y, double xnorm2,
                             double l1_term, double l2_term, Vector& w) {
    const double step = 1.0 / (xnorm2 + l2_term);
    PathPoint point;
    point.converged = false;
    for (long it = 0; it < kPathMaxInner; ++it) {
        Vector grad = X.transpose() * (X * w - y) + l2_term * w;
        Vector w_next = soft_threshold(w - step * grad, step * l1_term);
        const double change = (w_next - w).cwiseAbs().maxCoeff();
        w = std::move(w_next);
        point.inner_iterations = it + 1;
        if (change <= kPathTol) {
            point.converged = true;
            break;
        }
    }
    point.w = w;
    return point;
}

void check_lambda_grid(const std::vector<double>& grid) {
    if (grid.empty())
        throw std::invalid_argument("lambda grid must be nonempty");
    for (size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0))
            throw std::invalid_argument("lambda grid must be positive");
        if (i > 0 && grid[i] >= grid[i - 1])
            throw std::invalid_argument("lambda grid must be decreasing");
    }
}

} // namespace

std::vector<PathPoint> lasso_path(const ProblemInstance& instance,
                                  const std::vector<double>& lambda_grid) {
    instance.validate();
    check_lambda_grid(lambda_grid);
    const double xnorm = spectral_norm(instance.X);
    const double xnorm2 = xnorm * xnorm;

    std::vector<PathPoint> path;
    path.reserve(lambda_grid.size());
    Vector w = Vector::Zero(instance.d());
    for (double lambda : lambda_grid) {
        PathPoint point = solve_penalized_l1(instance.X, instance.y_delta,
                                             xnorm2, lambda, 0.0, w);
        point.lambda = lambda;
        point.l1_ratio = 1.0;
        path.push_back(std::move(point));
    }
    return path;
}

std::vector<PathPoint> elasticnet_path(const ProblemInstance& instance,
                                       const std::vector<double>& lambda_grid,
                                       const std::vector<double>& l1_ratios) {
    instance.validate();
    check_lambda_grid(lambda_grid);
    if (l1_ratios.empty())
        throw std::invalid_argument("l1_ratios must be nonempty");
    for (double ratio : l1_ratios)
        if (!(ratio >= 0.0 && ratio <= 1.0))
            throw std::invalid_argument("l1 ratios must lie in [0,1]");

    const double xnorm = spectral_norm(instance.X);
    const double xnorm2 = xnorm * xnorm;

    std::vector<PathPoint> path;
    path.reserve(lambda_grid.size() * l1_ratios.size());
    for (double ratio : l1_ratios) {
        Vector w = Vector::Zero(instance.d());
        for (double lambda : lambda_grid) {
            PathPoint point =
                solve_penalized_l1(instance.X, instance.y_delta, xnorm2,
                                   lambda * ratio, lambda * (1.0 - ratio), w);
            point.lambda = lambda;
            point.l1_ratio = ratio;
            path.push_back(std::move(point));
        }
    }
    return path;
}

SolverRun ksn_penalized(const ProblemInstance& instance, Eigen::Index k,
                        double lambda, double L, long max_iter,
                        long record_every) {
    instance.validate();
    if (!(L > 0.0))
        throw std::invalid_argument("ksn_penalized: L must be positive");
    if (lambda < 0.0)
        throw std::invalid_argument("ksn_penalized: lambda must be >= 0");

    SolverRun run;
    run.solver = "ksn";
    run.config_echo = echo({{"k", double(k)},
                            {"lambda", lambda},
                            {"L", L},
                            {"T", double(max_iter)}});

    const Matrix& X = instance.X;
    const Vector& y = instance.y_delta;
    const KSupProxParams prox_params{k, lambda / L};
    prox_params.validate(instance.d());

    Vector w = Vector::Zero(instance.d());
    for (long t = 0; t < max_iter; ++t) {
        Vector grad = X.transpose() * (X * w - y);
        w = prox_half_squared_ksup(w - grad / L, prox_params).first;
        check_finite("ksn", w, t);
        record(run, t, record_every, w, X * w - y);
    }
    return run;
}

Vector omp(const ProblemInstance& instance, Eigen::Index k) {
    instance.validate();
    if (k < 1 || k > std::min(instance.n(), instance.d()))
        throw std::invalid_argument("omp: k must satisfy 1 <= k <= min(n,d)");

    const Matrix& X = instance.X;
    const Vector& y = instance.y_delta;
    const Eigen::Index d = instance.d();

    IndexSet support;
    Vector residual = y;
    Vector w = Vector::Zero(d);
    std::vector<bool> selected(static_cast<size_t>(d), false);

    for (Eigen::Index round = 0; round < k; ++round) {
        Eigen::Index best = -1;
        double best_corr = -1.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            if (selected[static_cast<size_t>(j)])
                continue;
            const double corr = std::abs(X.col(j).dot(residual));
            if (corr > best_corr) {
                best_corr = corr;
                best = j;
            }
        }
        selected[static_cast<size_t>(best)] = true;
        support.push_back(best);

        Matrix Xs(X.rows(), static_cast<Eigen::Index>(support.size()));
        for (size_t i = 0; i < support.size(); ++i)
            Xs.col(static_cast<Eigen::Index>(i)) = X.col(support[i]);
        Vector coef = pseudo_inverse(Xs) * y;
        residual = y - Xs * coef;

        w.setZero();
        for (size_t i = 0; i < support.size(); ++i)
            w[support[i]] = coef[static_cast<Eigen::Index>(i)];
    }
    return w;
}

SolverRun srdi(const ProblemInstance& instance, double kappa,
               double alpha_srdi, long max_iter, long record_every) {
    instance.validate();
    if (!(kappa > 0.0) || !(alpha_srdi > 0.0))
        throw std::invalid_argument("srdi: kappa and alpha must be positive");

    SolverRun run;
    run.solver = "srdi";
    run.config_echo = echo({{"kappa", kappa},
                            {"alpha", alpha_srdi},
                            {"T", double(max_iter)}});

    const Matrix& X = instance.X;
    const Vector& y = instance.y_delta;

    Vector z = Vector::Zero(instance.d());
    Vector w = Vector::Zero(instance.d());
    for (long t = 0; t < max_iter; ++t) {
        z -= alpha_srdi * (X.transpose() * (X * w - y));
        w = kappa * soft_threshold(z, 1.0);
        check_finite("srdi", w, t);
        record(run, t, record_every, w, X * w - y);
    }
    return run;
}

SolverRun irosr(const ProblemInstance& instance, double eta, double alpha_init,
                long max_iter, long record_every) {
    instance.validate();
    if (!(eta > 0.0))
        throw std::invalid_argument("irosr: eta must be positive");
    if (alpha_init < 0.0)
        throw std::invalid_argument("irosr: alpha_init must be >= 0");

    SolverRun run;
    run.solver = "irosr";
    run.config_echo = echo({{"eta", eta},
                            {"alpha_init", alpha_init},
                            {"T", double(max_iter)}});

    const Matrix& X = instance.X;
    const Vector& y = instance.y_delta;

    Vector u = Vector::Constant(instance.d(), alpha_init);
    Vector v = Vector::Constant(instance.d(), alpha_init);
    for (long t = 0; t < max_iter; ++t) {
        Vector w = u.cwiseProduct(u) - v.cwiseProduct(v);
        Vector g = X.transpose() * (X * w - y);
        u = u.cwiseProduct(Vector::Ones(instance.d()) - eta * g);
        v = v.cwiseProduct(Vector::Ones(instance.d()) + eta * g);
        w = u.cwiseProduct(u) - v.cwiseProduct(v);
        check_finite("irosr", w, t);
        record(run, t, record_every, w, X * w - y);
    }
    return run;
}

SolverRun ircr(const ProblemInstance& instance, long max_iter,
               long record_every) {
    instance.validate();

    const Matrix& X = instance.X;
    const Vector& y = instance.y_delta;
    const double xnorm = spectral_norm(X);
    if (xnorm == 0.0)
        throw std::invalid_argument("ircr: X is zero");
    const double tau = 0.9 / std::sqrt(2.0 * xnorm * xnorm);
    const double sigma = tau;

    SolverRun run;
    run.solver = "ircr";
    run.config_echo = echo({{"tau", tau}, {"sigma", sigma}, {"T", double(max_iter)}});

    Vector w = Vector::Zero(instance.d());
    Vector w_bar = w;
    Vector v = Vector::Zero(instance.n());
    for (long t = 0; t < max_iter; ++t) {
        v += sigma * (X * w_bar - y);
        Vector w_next = soft_threshold(w - tau * (X.transpose() * v), tau);
        w_bar = 2.0 * w_next - w;
        w = std::move(w_next);
        check_finite("ircr", w, t);
        record(run, t, record_every, w, X * w - y);
    }
    return run;
}

} // namespace ksn
