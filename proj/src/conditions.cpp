#include "ksn/conditions.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ksn {

namespace {

constexpr double kStrictnessMargin = 1e-12;
constexpr double kInjectivityRatio = 1e-8;

void check_pair(const ProblemInstance& instance, const GroundTruth& truth) {
    instance.validate();
    if (truth.w_star.size() != instance.d())
        throw std::invalid_argument("ground truth w* has wrong dimension");
    if (truth.y_clean.size() != instance.n())
        throw std::invalid_argument("ground truth y has wrong dimension");
    if (truth.support.empty())
        throw std::invalid_argument("ground truth support is empty");
    for (Eigen::Index j : truth.support)
        if (j < 0 || j >= instance.d())
            throw std::invalid_argument("support index out of range");
}

Matrix support_columns(const Matrix& X, const IndexSet& support) {
    Matrix Xs(X.rows(), static_cast<Eigen::Index>(support.size()));
    for (size_t i = 0; i < support.size(); ++i)
        Xs.col(static_cast<Eigen::Index>(i)) = X.col(support[i]);
    return Xs;
}

Vector support_values(const Vector& w, const IndexSet& support) {
    Vector ws(static_cast<Eigen::Index>(support.size()));
    for (size_t i = 0; i < support.size(); ++i)
        ws[static_cast<Eigen::Index>(i)] = w[support[i]];
    return ws;
}

IndexSet complement(const IndexSet& support, Eigen::Index d) {
    std::vector<bool> in_s(static_cast<size_t>(d), false);
    for (Eigen::Index j : support)
        in_s[static_cast<size_t>(j)] = true;
    IndexSet out;
    for (Eigen::Index j = 0; j < d; ++j)
        if (!in_s[static_cast<size_t>(j)])
            out.push_back(j);
    return out;
}

bool injective(const Matrix& Xs) {
    Eigen::JacobiSVD<Matrix> svd(Xs);
    const Vector& sigma = svd.singularValues();
    if (Xs.cols() > Xs.rows() || sigma.size() == 0)
        return false;
    return sigma(sigma.size() - 1) > kInjectivityRatio * sigma(0);
}

} // namespace

std::string to_string(RecoveryRegion region) {
    switch (region) {
    case RecoveryRegion::ours_only: return "ours_only";
    case RecoveryRegion::l1_and_ours: return "l1_and_ours";
    case RecoveryRegion::l1_only: return "l1_only";
    case RecoveryRegion::neither: return "neither";
    }
    return "neither";
}

bool check_assumption1(const ProblemInstance& instance,
                       const GroundTruth& truth, double tol) {
    check_pair(instance, truth);
    const Matrix Xs = support_columns(instance.X, truth.support);
    const Vector ws = support_values(truth.w_star, truth.support);

    const double feasibility = (Xs * ws - truth.y_clean).norm();
    if (feasibility > tol * std::max(1.0, truth.y_clean.norm()))
        return false;

    const Vector min_norm = pseudo_inverse(Xs) * truth.y_clean;
    return (ws - min_norm).norm() <= tol * std::max(1.0, ws.norm());
}

ConditionReport check_assumption2(const ProblemInstance& instance,
                                  const GroundTruth& truth) {
    check_pair(instance, truth);
    const Matrix Xs = support_columns(instance.X, truth.support);
    const Vector ws = support_values(truth.w_star, truth.support);
    const Matrix Xs_pinv = pseudo_inverse(Xs);
    const IndexSet off_support = complement(truth.support, instance.d());

    ConditionReport report;
    report.ours_lhs = 0.0; // max over the empty set is 0 when k = d
    for (Eigen::Index l : off_support)
        report.ours_lhs = std::max(
            report.ours_lhs, std::abs((Xs_pinv * instance.X.col(l)).dot(ws)));

    report.ours_rhs = std::numeric_limits<double>::infinity();
    for (Eigen::Index j : truth.support)
        report.ours_rhs = std::min(
            report.ours_rhs, std::abs((Xs_pinv * instance.X.col(j)).dot(ws)));

    const double gap = report.ours_rhs - report.ours_lhs;
    report.a2_holds = gap > kStrictnessMargin;
    report.a2_boundary = std::abs(gap) <= kStrictnessMargin;
    return report;
}

ConditionReport check_assumption3_l1(const ProblemInstance& instance,
                                     const GroundTruth& truth) {
    check_pair(instance, truth);
    const Matrix Xs = support_columns(instance.X, truth.support);
    const Vector ws = support_values(truth.w_star, truth.support);
    const Vector sign_ws = ws.unaryExpr(
        [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
    const Matrix Xs_pinv = pseudo_inverse(Xs);
    const IndexSet off_support = complement(truth.support, instance.d());

    ConditionReport report;
    report.l1_condition_value = 0.0;
    for (Eigen::Index l : off_support)
        report.l1_condition_value =
            std::max(report.l1_condition_value,
                     std::abs((Xs_pinv * instance.X.col(l)).dot(sign_ws)));

    report.xs_injective = injective(Xs);
    const double gap = 1.0 - report.l1_condition_value;
    report.a3_holds = report.xs_injective && gap > kStrictnessMargin;
    report.a3_boundary = std::abs(gap) <= kStrictnessMargin;
    return report;
}

ConditionReport full_condition_report(const ProblemInstance& instance,
                                      const GroundTruth& truth) {
    ConditionReport report = check_assumption2(instance, truth);
    const ConditionReport a3 = check_assumption3_l1(instance, truth);
    report.l1_condition_value = a3.l1_condition_value;
    report.xs_injective = a3.xs_injective;
    report.a3_holds = a3.a3_holds;
    report.a3_boundary = a3.a3_boundary;
    report.min_norm_holds = check_assumption1(instance, truth);

    // Margin of the early-stopping theorem, computed from (X_S X_S^T)^+ y.
    // When assumption 1 holds this agrees with ours_rhs - ours_lhs.
    const Matrix Xs = support_columns(instance.X, truth.support);
    const Vector dual = pseudo_inverse(Xs * Xs.transpose()) * truth.y_clean;
    double rhs = std::numeric_limits<double>::infinity();
    for (Eigen::Index j : truth.support)
        rhs = std::min(rhs, std::abs(dual.dot(instance.X.col(j))));
    double lhs = 0.0;
    for (Eigen::Index l : complement(truth.support, instance.d()))
        lhs = std::max(lhs, std::abs(dual.dot(instance.X.col(l))));
    report.eta = rhs - lhs;

    const double winf = truth.w_star.cwiseAbs().maxCoeff();
    if (report.eta > 0.0 && winf > 0.0) {
        report.alpha_max = report.eta / winf;
        report.alpha_max_defined = true;
    }

    report.region = classify_region(report);
    return report;
}

std::pair<TheoryBound, ConditionReport> theorem1_constants(
    const ProblemInstance& instance, const GroundTruth& truth, double alpha,
    double c, MatrixNormChoice norm_choice) {
    ConditionReport report = full_condition_report(instance, truth);
    if (!(report.eta > 0.0))
        throw std::invalid_argument(
            "theorem1_constants: margin eta is not positive; the recovery "
            "condition fails on this instance");
    if (!report.alpha_max_defined || !(alpha < report.alpha_max))
        throw std::invalid_argument(
            "theorem1_constants: alpha must be below eta / ||w*||_inf");
    if (!(c > 0.0))
        throw std::invalid_argument("theorem1_constants: c must be positive");

    const double xnorm = matrix_norm(instance.X, norm_choice);
    const Matrix Xs = support_columns(instance.X, truth.support);
    const Vector ws = support_values(truth.w_star, truth.support);

    TheoryBound bound;
    bound.a = 4.0 / xnorm;
    bound.b = 2.0 * xnorm * (pseudo_inverse(Xs.transpose()) * ws).norm() / alpha;
    bound.c = c;
    if (instance.delta > 0.0)
        bound.t_delta = static_cast<long>(
            std::ceil(c / std::sqrt(instance.delta)));
    else
        bound.t_delta = 1;
    return {bound, report};
}

RecoveryRegion classify_region(const ConditionReport& report) {
    if (report.a2_holds && report.a3_holds)
        return RecoveryRegion::l1_and_ours;
    if (report.a2_holds)
        return RecoveryRegion::ours_only;
    if (report.a3_holds)
        return RecoveryRegion::l1_only;
    return RecoveryRegion::neither;
}

std::string serialize_report(const ConditionReport& report) {
    std::ostringstream os;
    os.precision(17);
    os << "l1_condition_value = " << report.l1_condition_value << "\n"
       << "ours_lhs = " << report.ours_lhs << "\n"
       << "ours_rhs = " << report.ours_rhs << "\n"
       << "xs_injective = " << (report.xs_injective ? "true" : "false") << "\n"
       << "min_norm_holds = " << (report.min_norm_holds ? "true" : "false") << "\n"
       << "a2_holds = " << (report.a2_holds ? "true" : "false") << "\n"
       << "a2_boundary = " << (report.a2_boundary ? "true" : "false") << "\n"
       << "a3_holds = " << (report.a3_holds ? "true" : "false") << "\n"
       << "a3_boundary = " << (report.a3_boundary ? "true" : "false") << "\n"
       << "eta = " << report.eta << "\n";
    if (report.alpha_max_defined)
        os << "alpha_max = " << report.alpha_max << "\n";
    else
        os << "alpha_max = undefined\n";
    os << "region = " << to_string(report.region) << "\n";
    return os.str();
}

} // namespace ksn
