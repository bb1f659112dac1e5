#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ksn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexSet = std::vector<Eigen::Index>;

/// A noisy linear-measurement problem: recover a sparse w from
/// y_delta = X w + eps with ||eps|| <= delta.
struct ProblemInstance {
    Matrix X;        // n x d design matrix
    Vector y_delta;  // noisy target, length n
    double delta = 0.0;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index d() const { return X.cols(); }
    void validate() const;
};

/// The generating model behind an instance. Only available for synthetic
/// data; needed by condition checkers and support-recovery metrics.
struct GroundTruth {
    Vector w_star;    // true coefficient vector, length d
    IndexSet support; // supp(w_star), sorted ascending
    Vector y_clean;   // X * w_star
};

/// Thrown when an iterate turns non-finite. Carries the iteration index so
/// grid searches can log which cell blew up.
class DivergenceError : public std::runtime_error {
  public:
    DivergenceError(const std::string& solver, long iteration)
        : std::runtime_error(solver + " diverged at iteration " +
                             std::to_string(iteration)),
          iteration_(iteration) {}
    long iteration() const { return iteration_; }

  private:
    long iteration_;
};

/// Per-iteration scalar diagnostics recorded by iterative solvers.
struct IterationMetric {
    long t = 0;
    double residual_norm = 0.0; // ||X w_t - y_delta||
    Eigen::Index sparsity = 0;  // nnz of w_t at tolerance 1e-8
};

/// Recorded trajectory of an iterative solver: periodic coefficient
/// snapshots plus scalar metrics, with a one-line echo of the configuration
/// that produced them.
struct SolverRun {
    std::string solver;
    std::string config_echo;
    std::vector<std::pair<long, Vector>> snapshots; // (t, w_t), t increasing
    std::vector<IterationMetric> metrics;

    const Vector& final_iterate() const {
        if (snapshots.empty())
            throw std::logic_error("SolverRun has no snapshots");
        return snapshots.back().second;
    }
};

inline void ProblemInstance::validate() const {
    if (X.rows() < 1 || X.cols() < 1)
        throw std::invalid_argument("ProblemInstance: X must be non-empty");
    if (y_delta.size() != X.rows())
        throw std::invalid_argument(
            "ProblemInstance: y_delta length must equal rows of X");
    if (!X.allFinite() || !y_delta.allFinite())
        throw std::invalid_argument("ProblemInstance: entries must be finite");
    if (!(delta >= 0.0))
        throw std::invalid_argument("ProblemInstance: delta must be >= 0");
}

} // namespace ksn
