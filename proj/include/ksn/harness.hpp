#pragma once

#include "ksn/conditions.hpp"
#include "ksn/datagen.hpp"
#include "ksn/metrics.hpp"
#include "ksn/solvers.hpp"

#include <map>
#include <optional>
#include <string>

namespace ksn {

/// One hyperparameter grid: named value lists whose Cartesian product forms
/// the cells. Cell order is lexicographic over sorted parameter names with
/// values in listed order; this order breaks exact ties in the grid search.
using ParamGrid = std::map<std::string, std::vector<double>>;

/// The hyperparameter lists used by the synthetic study. lasso/elasticnet
/// expand to their paths (each path point is one cell), ircr and omp have a
/// single cell.
ParamGrid default_grid(const std::string& algorithm);

/// Solver-independent knobs of one grid search.
struct GridRunSettings {
    Eigen::Index k = 10;      // sparsity level for k-aware algorithms
    long max_iter = 20000;
    long record_every = 5;
    std::uint64_t seed = 0;   // stamped into the returned rows
    // The synthetic study follows the source experiments and derives the
    // accelerated solver's step from the nuclear norm; the solver's own
    // default elsewhere is spectral.
    MatrixNormChoice irksn_norm = MatrixNormChoice::nuclear;
};

struct GridResult {
    MetricRow best;       // max F1, ties by lower err2 then earlier cell
    MetricRow best_final; // last recorded iterate of the winning cell
    long cells_run = 0;
    std::vector<std::string> skipped; // diverged or invalid cells
};

/// Runs every cell of the grid for one algorithm on one instance; for
/// iterative solvers the best F1 over all recorded iterations counts
/// (oracle early stopping).
GridResult run_grid(const ProblemInstance& instance, const GroundTruth& truth,
                    const std::string& algorithm, const ParamGrid& grid,
                    const GridRunSettings& settings);

struct ExperimentConfig {
    std::string name = "sweep";
    std::string sweep = "n"; // one of: n, snr, rho
    std::vector<double> sweep_values;
    SyntheticSpec base; // fixed values for the non-swept parameters
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> algorithms;
    std::map<std::string, ParamGrid> grid_overrides;
    Eigen::Index k = 10;
    long max_iter = 20000;
    long record_every = 5;
    MatrixNormChoice irksn_norm = MatrixNormChoice::nuclear;
    int jobs = 0; // parallel work units; 0 = all cores
    std::string out_dir = ".";

    void validate() const;
};

struct AggregateRow {
    std::string algorithm;
    double sweep_value = 0.0;
    double mean_best_f1 = 0.0;
    double std_best_f1 = 0.0;
    std::vector<GridResult> per_seed; // ordered as config.seeds
};

struct AggregateResult {
    ExperimentConfig config;
    std::vector<AggregateRow> rows; // algorithm-major, sweep values ascending
};

/// Generates an instance per (sweep value, seed), grid-searches every
/// algorithm, and aggregates mean/std of the per-seed best F1. Work units
/// run in a parallel map; aggregation order is deterministic.
AggregateResult run_sweep(const ExperimentConfig& config);

/// CSV renderings (per-seed rows, and the aggregate table).
std::string sweep_rows_csv(const AggregateResult& result);
std::string aggregate_csv(const AggregateResult& result);

struct BoundCheck {
    bool accepted = false;     // assumptions held, bound was checked
    std::string rejection;     // failing condition when not accepted
    double alpha = 0.0;
    double min_slack = 0.0;    // min over t of (a t delta + b/t) - error_t
    long points_checked = 0;
};

struct BoundReport {
    std::vector<BoundCheck> checks;
    double min_slack = 0.0;
    bool all_hold(double tolerance = 1e-9) const;
    std::string to_string() const;
};

/// Runs the accelerated solver on each (instance, truth, alpha) triple and
/// verifies the early-stopping inequality at every recorded t in [2, T].
/// Instances whose assumptions fail are reported, not checked.
BoundReport verify_bound_sweep(
    const std::vector<std::pair<ProblemInstance, GroundTruth>>& instances,
    const std::vector<double>& alphas, double c, long max_iter = 2000,
    long record_every = 1);

} // namespace ksn
