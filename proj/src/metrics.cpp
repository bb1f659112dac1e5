#include "ksn/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace ksn {

double support_tol_for(const std::string& algorithm) {
    return algorithm == "irosr" ? kSupportTolApprox : kSupportTolExact;
}

IndexSet support_of(const Vector& w, double support_tol) {
    if (support_tol < 0.0)
        throw std::invalid_argument("support_tol must be >= 0");
    IndexSet s;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (std::abs(w[i]) > support_tol)
            s.push_back(i);
    return s;
}

F1Score f1_support(const Vector& w_hat, const GroundTruth& truth,
                   double support_tol) {
    if (truth.support.empty())
        throw std::invalid_argument("f1_support: true support is empty");
    const IndexSet predicted = support_of(w_hat, support_tol);

    size_t hits = 0;
    // both index sets are sorted ascending
    auto it = truth.support.begin();
    for (Eigen::Index i : predicted) {
        while (it != truth.support.end() && *it < i)
            ++it;
        if (it != truth.support.end() && *it == i)
            ++hits;
    }

    F1Score score;
    score.precision =
        predicted.empty() ? 0.0 : double(hits) / double(predicted.size());
    score.recall = double(hits) / double(truth.support.size());
    const double pr = score.precision + score.recall;
    score.f1 = pr > 0.0 ? 2.0 * score.precision * score.recall / pr : 0.0;
    return score;
}

double model_error(const Vector& w_hat, const GroundTruth& truth) {
    return (w_hat - truth.w_star).norm();
}

std::vector<MetricRow> extract_path(const SolverRun& run,
                                    const GroundTruth& truth,
                                    double support_tol) {
    std::vector<MetricRow> rows;
    rows.reserve(run.snapshots.size());
    for (const auto& [t, w] : run.snapshots) {
        MetricRow row;
        row.algorithm = run.solver;
        row.iteration_or_lambda = static_cast<double>(t);
        const F1Score score = f1_support(w, truth, support_tol);
        row.f1 = score.f1;
        row.precision = score.precision;
        row.recall = score.recall;
        row.err2 = model_error(w, truth);
        row.sparsity =
            static_cast<Eigen::Index>(support_of(w, support_tol).size());
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

// Shortest representation that round-trips to the same double.
std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

std::string metric_csv_header() {
    return "algorithm,seed,params,iter,f1,precision,recall,err2,sparsity";
}

std::string to_csv_line(const MetricRow& row) {
    std::ostringstream params;
    bool first = true;
    for (const auto& [key, value] : row.hyperparams) {
        params << (first ? "" : ";") << key << "=" << format_double(value);
        first = false;
    }
    std::ostringstream os;
    os << row.algorithm << ',' << row.seed << ',' << params.str() << ','
       << format_double(row.iteration_or_lambda) << ',' << format_double(row.f1)
       << ',' << format_double(row.precision) << ',' << format_double(row.recall)
       << ',' << format_double(row.err2) << ',' << row.sparsity;
    return os.str();
}

} // namespace ksn
