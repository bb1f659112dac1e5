#include "ksn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace ksn {

namespace {

const std::vector<double> kLogGrid5 = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};

std::vector<std::map<std::string, double>> expand_cells(const ParamGrid& grid) {
    std::vector<std::map<std::string, double>> cells = {{}};
    for (const auto& [key, values] : grid) {
        std::vector<std::map<std::string, double>> next;
        next.reserve(cells.size() * values.size());
        for (const auto& cell : cells) {
            for (double v : values) {
                auto extended = cell;
                extended[key] = v;
                next.push_back(std::move(extended));
            }
        }
        cells = std::move(next);
    }
    return cells;
}

std::string cell_to_string(const std::map<std::string, double>& cell) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [key, value] : cell) {
        os << (first ? "" : " ") << key << "=" << value;
        first = false;
    }
    return os.str();
}

// max-F1 selection; ties by lower err2, then by earlier cell order.
bool better(const MetricRow& candidate, const MetricRow& incumbent) {
    if (candidate.f1 != incumbent.f1)
        return candidate.f1 > incumbent.f1;
    return candidate.err2 < incumbent.err2;
}

} // namespace

ParamGrid default_grid(const std::string& algorithm) {
    if (algorithm == "iht")
        return {{"eta", kLogGrid5}};
    if (algorithm == "srdi")
        return {{"kappa", kLogGrid5}, {"alpha", kLogGrid5}};
    if (algorithm == "irosr")
        return {{"eta", kLogGrid5}, {"alpha_init", kLogGrid5}};
    if (algorithm == "irksn")
        return {{"alpha", {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0}}};
    if (algorithm == "ksn")
        return {{"lambda", {0.1, 1.0}}};
    if (algorithm == "elasticnet")
        return {{"l1_ratio", {0.1, 0.5, 0.7, 0.9, 0.95, 0.99, 1.0}}};
    if (algorithm == "ircr" || algorithm == "lasso" || algorithm == "omp")
        return {};
    throw std::invalid_argument("unknown algorithm: " + algorithm);
}

GridResult run_grid(const ProblemInstance& instance, const GroundTruth& truth,
                    const std::string& algorithm, const ParamGrid& grid,
                    const GridRunSettings& settings) {
    GridResult result;
    bool have_best = false;
    const double tol = support_tol_for(algorithm);

    auto consider = [&](const std::vector<MetricRow>& rows,
                        const std::map<std::string, double>& cell) {
        if (rows.empty())
            return;
        ++result.cells_run;
        const MetricRow* cell_best = &rows.front();
        for (const MetricRow& row : rows)
            if (better(row, *cell_best))
                cell_best = &row;
        if (!have_best || better(*cell_best, result.best)) {
            have_best = true;
            result.best = *cell_best;
            result.best_final = rows.back();
            for (MetricRow* r : {&result.best, &result.best_final}) {
                r->algorithm = algorithm;
                r->seed = settings.seed;
                r->hyperparams = cell;
            }
        }
    };

    auto path_rows = [&](const std::vector<PathPoint>& path) {
        // each path point is its own cell
        for (const PathPoint& point : path) {
            MetricRow row;
            row.algorithm = algorithm;
            const F1Score score = f1_support(point.w, truth, tol);
            row.f1 = score.f1;
            row.precision = score.precision;
            row.recall = score.recall;
            row.err2 = model_error(point.w, truth);
            row.sparsity =
                static_cast<Eigen::Index>(support_of(point.w, tol).size());
            row.iteration_or_lambda = point.lambda;
            consider({row}, {{"lambda", point.lambda},
                             {"l1_ratio", point.l1_ratio}});
        }
    };

    if (algorithm == "lasso") {
        path_rows(lasso_path(instance, default_lambda_grid(instance)));
        return result;
    }
    if (algorithm == "elasticnet") {
        std::vector<double> ratios;
        if (auto it = grid.find("l1_ratio"); it != grid.end())
            ratios = it->second;
        else
            ratios = default_grid("elasticnet")["l1_ratio"];
        path_rows(elasticnet_path(instance, default_lambda_grid(instance), ratios));
        return result;
    }

    for (const auto& cell : expand_cells(grid)) {
        try {
            if (algorithm == "omp") {
                const Vector w = omp(instance, settings.k);
                MetricRow row;
                const F1Score score = f1_support(w, truth, tol);
                row.f1 = score.f1;
                row.precision = score.precision;
                row.recall = score.recall;
                row.err2 = model_error(w, truth);
                row.sparsity =
                    static_cast<Eigen::Index>(support_of(w, tol).size());
                consider({row}, cell);
                continue;
            }

            SolverRun run;
            if (algorithm == "irksn") {
                IrksnConfig config;
                config.k = settings.k;
                config.alpha = cell.at("alpha");
                config.max_iter = settings.max_iter;
                config.record_every = settings.record_every;
                config.norm_choice = settings.irksn_norm;
                run = irksn(instance, config);
            } else if (algorithm == "iht") {
                run = iht(instance, settings.k, cell.at("eta"),
                          settings.max_iter, settings.record_every);
            } else if (algorithm == "ksn") {
                run = ksn_penalized(instance, settings.k, cell.at("lambda"),
                                    1e6, settings.max_iter,
                                    settings.record_every);
            } else if (algorithm == "srdi") {
                run = srdi(instance, cell.at("kappa"), cell.at("alpha"),
                           settings.max_iter, settings.record_every);
            } else if (algorithm == "irosr") {
                run = irosr(instance, cell.at("eta"), cell.at("alpha_init"),
                            settings.max_iter, settings.record_every);
            } else if (algorithm == "ircr") {
                run = ircr(instance, settings.max_iter, settings.record_every);
            } else {
                throw std::invalid_argument("unknown algorithm: " + algorithm);
            }
            consider(extract_path(run, truth, tol), cell);
        } catch (const DivergenceError& e) {
            result.skipped.push_back(algorithm + " [" + cell_to_string(cell) +
                                     "]: " + e.what());
        } catch (const std::invalid_argument& e) {
            result.skipped.push_back(algorithm + " [" + cell_to_string(cell) +
                                     "]: " + e.what());
        }
    }
    return result;
}

void ExperimentConfig::validate() const {
    if (sweep != "n" && sweep != "snr" && sweep != "rho")
        throw std::invalid_argument("sweep must be one of n, snr, rho");
    if (sweep_values.empty())
        throw std::invalid_argument("sweep_values must be nonempty");
    if (seeds.empty())
        throw std::invalid_argument("seeds must be nonempty");
    if (algorithms.empty())
        throw std::invalid_argument("algorithms must be nonempty");
    for (const auto& algorithm : algorithms)
        default_grid(algorithm); // throws on unknown names
    base.validate();
}

namespace {

SyntheticSpec spec_for(const ExperimentConfig& config, double sweep_value,
                       std::uint64_t seed) {
    SyntheticSpec spec = config.base;
    spec.seed = seed;
    if (config.sweep == "n")
        spec.n = static_cast<Eigen::Index>(sweep_value);
    else if (config.sweep == "snr")
        spec.snr = sweep_value;
    else
        spec.rho = sweep_value;
    return spec;
}

void parallel_for(size_t count, int jobs, const std::function<void(size_t)>& fn) {
    unsigned hardware = std::thread::hardware_concurrency();
    size_t workers = jobs > 0 ? static_cast<size_t>(jobs)
                              : (hardware > 0 ? hardware : 1);
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                fn(i);
        });
    for (auto& th : pool)
        th.join();
}

} // namespace

AggregateResult run_sweep(const ExperimentConfig& config) {
    config.validate();

    struct Task {
        size_t value_idx, seed_idx, algo_idx;
    };
    std::vector<Task> tasks;
    for (size_t v = 0; v < config.sweep_values.size(); ++v)
        for (size_t s = 0; s < config.seeds.size(); ++s)
            for (size_t a = 0; a < config.algorithms.size(); ++a)
                tasks.push_back({v, s, a});

    std::vector<GridResult> results(tasks.size());
    parallel_for(tasks.size(), config.jobs, [&](size_t i) {
        const Task& task = tasks[i];
        const auto [instance, truth] = gen_correlated(spec_for(
            config, config.sweep_values[task.value_idx],
            config.seeds[task.seed_idx]));
        const std::string& algorithm = config.algorithms[task.algo_idx];
        ParamGrid grid;
        if (auto it = config.grid_overrides.find(algorithm);
            it != config.grid_overrides.end())
            grid = it->second;
        else
            grid = default_grid(algorithm);
        GridRunSettings settings;
        settings.k = config.k;
        settings.max_iter = config.max_iter;
        settings.record_every = config.record_every;
        settings.seed = config.seeds[task.seed_idx];
        settings.irksn_norm = config.irksn_norm;
        results[i] = run_grid(instance, truth, algorithm, grid, settings);
    });

    AggregateResult aggregate;
    aggregate.config = config;
    for (size_t a = 0; a < config.algorithms.size(); ++a) {
        for (size_t v = 0; v < config.sweep_values.size(); ++v) {
            AggregateRow row;
            row.algorithm = config.algorithms[a];
            row.sweep_value = config.sweep_values[v];
            double sum = 0.0, sum_sq = 0.0;
            for (size_t s = 0; s < config.seeds.size(); ++s) {
                const size_t idx =
                    (v * config.seeds.size() + s) * config.algorithms.size() + a;
                row.per_seed.push_back(results[idx]);
                sum += results[idx].best.f1;
                sum_sq += results[idx].best.f1 * results[idx].best.f1;
            }
            const double count = static_cast<double>(config.seeds.size());
            row.mean_best_f1 = sum / count;
            row.std_best_f1 = std::sqrt(
                std::max(0.0, sum_sq / count - row.mean_best_f1 * row.mean_best_f1));
            aggregate.rows.push_back(std::move(row));
        }
    }
    return aggregate;
}

std::string sweep_rows_csv(const AggregateResult& result) {
    std::ostringstream os;
    os << "sweep,sweep_value," << metric_csv_header() << "\n";
    for (const AggregateRow& row : result.rows)
        for (const GridResult& seed_result : row.per_seed)
            os << result.config.sweep << ',' << row.sweep_value << ','
               << to_csv_line(seed_result.best) << "\n";
    return os.str();
}

std::string aggregate_csv(const AggregateResult& result) {
    std::ostringstream os;
    os.precision(17);
    os << "algorithm,sweep,sweep_value,mean_best_f1,std_best_f1,seeds\n";
    for (const AggregateRow& row : result.rows)
        os << row.algorithm << ',' << result.config.sweep << ','
           << row.sweep_value << ',' << row.mean_best_f1 << ','
           << row.std_best_f1 << ',' << row.per_seed.size() << "\n";
    return os.str();
}

bool BoundReport::all_hold(double tolerance) const {
    for (const BoundCheck& check : checks)
        if (check.accepted && check.min_slack < -tolerance)
            return false;
    return true;
}

std::string BoundReport::to_string() const {
    std::ostringstream os;
    os.precision(12);
    long accepted = 0;
    for (const BoundCheck& check : checks)
        accepted += check.accepted ? 1 : 0;
    os << "instances = " << checks.size() << "\n"
       << "accepted = " << accepted << "\n"
       << "min_slack = " << min_slack << "\n";
    for (size_t i = 0; i < checks.size(); ++i) {
        os << "instance " << i << ": ";
        if (!checks[i].accepted) {
            os << "rejected (" << checks[i].rejection << ")\n";
            continue;
        }
        os << "alpha = " << checks[i].alpha
           << ", points = " << checks[i].points_checked
           << ", min_slack = " << checks[i].min_slack << "\n";
    }
    return os.str();
}

BoundReport verify_bound_sweep(
    const std::vector<std::pair<ProblemInstance, GroundTruth>>& instances,
    const std::vector<double>& alphas, double c, long max_iter,
    long record_every) {
    if (alphas.size() != instances.size())
        throw std::invalid_argument(
            "verify_bound_sweep: need one alpha per instance");

    BoundReport report;
    report.min_slack = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < instances.size(); ++i) {
        const auto& [instance, truth] = instances[i];
        BoundCheck check;
        check.alpha = alphas[i];

        if (!check_assumption1(instance, truth)) {
            check.rejection = "assumption 1 (min-norm feasibility) fails";
            report.checks.push_back(check);
            continue;
        }
        const ConditionReport a2 = check_assumption2(instance, truth);
        if (!a2.a2_holds) {
            check.rejection = "assumption 2 (k-support condition) fails";
            report.checks.push_back(check);
            continue;
        }

        TheoryBound bound;
        try {
            bound = theorem1_constants(instance, truth, alphas[i], c).first;
        } catch (const std::invalid_argument& e) {
            check.rejection = e.what();
            report.checks.push_back(check);
            continue;
        }

        IrksnConfig config;
        config.k = static_cast<Eigen::Index>(truth.support.size());
        config.alpha = alphas[i];
        config.max_iter = max_iter;
        config.record_every = record_every;
        const SolverRun run = irksn(instance, config);

        check.accepted = true;
        check.min_slack = std::numeric_limits<double>::infinity();
        for (const auto& [t, w] : run.snapshots) {
            if (t < 2)
                continue;
            const double envelope = bound.a * double(t) * instance.delta +
                                    bound.b / double(t);
            check.min_slack = std::min(
                check.min_slack, envelope - model_error(w, truth));
            ++check.points_checked;
        }
        report.min_slack = std::min(report.min_slack, check.min_slack);
        report.checks.push_back(check);
    }
    return report;
}

} // namespace ksn
