#pragma once

#include "ksn/linalg.hpp"
#include "ksn/types.hpp"

#include <optional>

namespace ksn {

enum class RecoveryRegion { ours_only, l1_and_ours, l1_only, neither };

std::string to_string(RecoveryRegion region);

/// Numerical values of the recovery conditions for one (instance, truth)
/// pair. The "ours" quantities compare max_{l not in S} |<Xs^+ x_l, w*_S>|
/// against min_{j in S} |<Xs^+ x_j, w*_S>|; the l1 quantity replaces w*_S by
/// sgn(w*_S) and additionally requires X_S injective.
struct ConditionReport {
    double l1_condition_value = 0.0;
    double ours_lhs = 0.0;
    double ours_rhs = 0.0;
    bool xs_injective = false;
    bool min_norm_holds = false;
    bool a2_holds = false;
    bool a2_boundary = false; // |ours_rhs - ours_lhs| within strictness margin
    bool a3_holds = false;
    bool a3_boundary = false;
    double eta = 0.0;       // margin from the early-stopping theorem
    double alpha_max = 0.0; // eta / ||w*||_inf, valid only when eta > 0
    bool alpha_max_defined = false;
    RecoveryRegion region = RecoveryRegion::neither;
};

/// Constants of the early-stopping error bound ||w_t - w*|| <= a t delta + b/t.
struct TheoryBound {
    double a = 0.0; // 4 ||X||^-1
    double b = 0.0; // 2 ||X|| ||(X_S^T)^+ w*_S|| / alpha
    double c = 1.0;
    long t_delta = 1; // ceil(c delta^-1/2)
};

/// Feasibility + minimum-norm check: w* must solve X_S w*_S = y_clean and be
/// the least-l2-norm solution on its support (w*_S = X_S^+ y_clean).
bool check_assumption1(const ProblemInstance& instance,
                       const GroundTruth& truth, double tol = 1e-8);

/// Fills ours_lhs / ours_rhs and the a2 flags.
ConditionReport check_assumption2(const ProblemInstance& instance,
                                  const GroundTruth& truth);

/// Fills l1_condition_value, xs_injective and the a3 flags.
ConditionReport check_assumption3_l1(const ProblemInstance& instance,
                                     const GroundTruth& truth);

/// All condition values plus eta, alpha_max and the region classification.
ConditionReport full_condition_report(const ProblemInstance& instance,
                                      const GroundTruth& truth);

/// Theorem constants for a given alpha. Throws std::invalid_argument if the
/// margin eta is not positive (assumption violation) or alpha >= alpha_max.
std::pair<TheoryBound, ConditionReport> theorem1_constants(
    const ProblemInstance& instance, const GroundTruth& truth, double alpha,
    double c, MatrixNormChoice norm_choice = MatrixNormChoice::spectral);

RecoveryRegion classify_region(const ConditionReport& report);

/// One "key = value" line per field, the on-disk form of a report.
std::string serialize_report(const ConditionReport& report);

} // namespace ksn
