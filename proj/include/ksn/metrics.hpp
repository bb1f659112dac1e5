#pragma once

#include "ksn/types.hpp"

#include <map>
#include <string>

namespace ksn {

/// Default support tolerances: iterates of prox-based solvers are exactly
/// sparse, reparameterized iterates (irosr) only approximately so.
constexpr double kSupportTolExact = 1e-8;
constexpr double kSupportTolApprox = 1e-6;

double support_tol_for(const std::string& algorithm);

struct F1Score {
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

/// One evaluated point of a solver trajectory or penalty path.
struct MetricRow {
    std::string algorithm;
    std::map<std::string, double> hyperparams;
    std::uint64_t seed = 0;
    double iteration_or_lambda = 0.0;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double err2 = 0.0;
    Eigen::Index sparsity = 0;
};

/// Indices i with |w_i| > support_tol, ascending.
IndexSet support_of(const Vector& w, double support_tol);

/// F1 = 2PR/(P+R) of support recovery, with P := 0 (hence F1 = 0) when the
/// predicted support is empty.
F1Score f1_support(const Vector& w_hat, const GroundTruth& truth,
                   double support_tol);

/// ||w_hat - w*||_2.
double model_error(const Vector& w_hat, const GroundTruth& truth);

/// One MetricRow per snapshot of a run.
std::vector<MetricRow> extract_path(const SolverRun& run,
                                    const GroundTruth& truth,
                                    double support_tol = kSupportTolExact);

/// Fixed CSV column order:
/// algorithm,seed,params,iter,f1,precision,recall,err2,sparsity
std::string metric_csv_header();
std::string to_csv_line(const MetricRow& row);

} // namespace ksn
