#include "ksn/conditions.hpp"
#include "ksn/datagen.hpp"
#include "ksn/harness.hpp"
#include "ksn/io.hpp"
#include "ksn/metrics.hpp"
#include "ksn/rng.hpp"
#include "ksn/selftest.hpp"
#include "ksn/solvers.hpp"
#include "ksn/svg.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace ksn;

namespace {

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

// component-path CSV: first column is the path parameter, then w_0..w_{d-1}
std::string component_path_csv(const std::string& param_name,
                               const std::vector<double>& params,
                               const std::vector<Vector>& ws) {
    std::ostringstream os;
    os << param_name;
    for (Eigen::Index j = 0; j < ws.front().size(); ++j)
        os << ",w" << j;
    os << "\n";
    for (size_t i = 0; i < params.size(); ++i) {
        os << format_double_shortest(params[i]);
        for (Eigen::Index j = 0; j < ws[i].size(); ++j)
            os << ',' << format_double_shortest(ws[i][j]);
        os << "\n";
    }
    return os.str();
}

FigureSpec component_path_figure(const std::string& title,
                                 const std::string& x_label,
                                 const std::vector<double>& params,
                                 const std::vector<Vector>& ws,
                                 const std::string& filename) {
    FigureSpec figure;
    figure.kind = FigureKind::path;
    figure.title = title;
    figure.x_label = x_label;
    figure.y_label = "coefficient";
    figure.filename = filename;
    for (Eigen::Index j = 0; j < ws.front().size(); ++j) {
        Series s;
        s.name = "w" + std::to_string(j);
        for (size_t i = 0; i < params.size(); ++i) {
            s.x.push_back(params[i]);
            s.y.push_back(ws[i][j]);
        }
        figure.series.push_back(std::move(s));
    }
    return figure;
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
    std::ostringstream os;
    os << metric_csv_header() << "\n";
    for (const MetricRow& row : rows)
        os << to_csv_line(row) << "\n";
    return os.str();
}

int cmd_example1(double alpha, long iters, long record_every,
                 std::uint64_t seed, const std::string& out) {
    if (iters < 2)
        throw CLI::ValidationError("--iters", "iters must be >= 2");
    const auto [instance, truth] = gen_example1(seed);
    const ConditionReport report = full_condition_report(instance, truth);
    write_file(out_path(out, "condition_report.txt"), serialize_report(report));
    write_file(out_path(out, "instance.txt"),
               serialize_instance(instance, &truth, seed));

    if (alpha <= 0.0)
        alpha = report.alpha_max / 2.0;
    std::cout << "example1: alpha = " << alpha
              << " (cap " << report.alpha_max << "), iters = " << iters << "\n";

    // accelerated k-support run + its coefficient path
    IrksnConfig config;
    config.k = 3;
    config.alpha = alpha;
    config.max_iter = iters;
    config.record_every = record_every;
    const SolverRun irksn_run = irksn(instance, config);
    {
        std::vector<double> ts;
        std::vector<Vector> ws;
        for (const auto& [t, w] : irksn_run.snapshots) {
            ts.push_back(double(t));
            ws.push_back(w);
        }
        write_file(out_path(out, "irksn_path.csv"),
                   component_path_csv("t", ts, ws));
        write_svg(component_path_figure("accelerated k-support path", "iteration",
                                        ts, ws, out_path(out, "path_irksn.svg")));
    }

    // l1 and elastic-net penalty paths
    const auto lambda_grid = default_lambda_grid(instance);
    {
        const auto path = lasso_path(instance, lambda_grid);
        std::vector<double> lambdas;
        std::vector<Vector> ws;
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            lambdas.push_back(it->lambda);
            ws.push_back(it->w);
        }
        write_file(out_path(out, "lasso_path.csv"),
                   component_path_csv("lambda", lambdas, ws));
        write_svg(component_path_figure("lasso path", "lambda", lambdas, ws,
                                        out_path(out, "path_lasso.svg")));
    }
    {
        const auto path = elasticnet_path(instance, lambda_grid, {0.8});
        std::vector<double> lambdas;
        std::vector<Vector> ws;
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            lambdas.push_back(it->lambda);
            ws.push_back(it->w);
        }
        write_file(out_path(out, "elasticnet_path.csv"),
                   component_path_csv("lambda", lambdas, ws));
    }

    // error / sparsity trajectories of the iterative methods, each at its
    // best grid cell (smallest model error anywhere along the run)
    FigureSpec error_figure;
    error_figure.kind = FigureKind::error_vs_iter;
    error_figure.title = "model error vs. iteration";
    error_figure.x_label = "iteration";
    error_figure.y_label = "model error";
    error_figure.filename = out_path(out, "error_vs_iter.svg");
    FigureSpec sparsity_figure;
    sparsity_figure.kind = FigureKind::sparsity_vs_iter;
    sparsity_figure.title = "iterate sparsity vs. iteration";
    sparsity_figure.x_label = "iteration";
    sparsity_figure.y_label = "nonzeros";
    sparsity_figure.filename = out_path(out, "sparsity_vs_iter.svg");

    auto add_series = [&](const std::string& name, const SolverRun& run) {
        const auto rows = extract_path(run, truth, support_tol_for(name));
        write_file(out_path(out, name + "_metrics.csv"), metrics_csv(rows));
        Series err, spars;
        err.name = name;
        spars.name = name;
        for (const MetricRow& row : rows) {
            err.x.push_back(row.iteration_or_lambda);
            err.y.push_back(row.err2);
            spars.x.push_back(row.iteration_or_lambda);
            spars.y.push_back(double(row.sparsity));
        }
        error_figure.series.push_back(std::move(err));
        sparsity_figure.series.push_back(std::move(spars));
    };
    add_series("irksn", irksn_run);

    auto best_error_run = [&](const std::string& name,
                              const std::function<SolverRun(double)>& make,
                              const std::vector<double>& grid) {
        SolverRun best;
        double best_err = std::numeric_limits<double>::infinity();
        for (double value : grid) {
            try {
                SolverRun run = make(value);
                for (const auto& [t, w] : run.snapshots) {
                    const double err = model_error(w, truth);
                    if (err < best_err) {
                        best_err = err;
                        best = run;
                    }
                }
            } catch (const DivergenceError& e) {
                std::cerr << name << ": skipped cell (" << e.what() << ")\n";
            }
        }
        return best;
    };

    const std::vector<double> log5 = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    add_series("iht", best_error_run("iht",
        [&](double eta) { return iht(instance, 3, eta, iters, record_every); },
        log5));
    add_series("ircr", ircr(instance, iters, record_every));
    {
        SolverRun best;
        double best_err = std::numeric_limits<double>::infinity();
        for (double eta : log5)
            for (double a0 : log5) {
                try {
                    SolverRun run = irosr(instance, eta, a0, iters, record_every);
                    for (const auto& [t, w] : run.snapshots) {
                        const double err = model_error(w, truth);
                        if (err < best_err) {
                            best_err = err;
                            best = run;
                        }
                    }
                } catch (const DivergenceError&) {
                }
            }
        add_series("irosr", best);
    }
    {
        SolverRun best;
        double best_err = std::numeric_limits<double>::infinity();
        for (double kappa : log5)
            for (double a0 : log5) {
                try {
                    SolverRun run = srdi(instance, kappa, a0, iters, record_every);
                    for (const auto& [t, w] : run.snapshots) {
                        const double err = model_error(w, truth);
                        if (err < best_err) {
                            best_err = err;
                            best = run;
                        }
                    }
                } catch (const DivergenceError&) {
                }
            }
        add_series("srdi", best);
    }

    write_svg(error_figure);
    write_svg(sparsity_figure);

    std::cout << "final model error (accelerated k-support run): "
              << model_error(irksn_run.final_iterate(), truth) << "\n"
              << "wrote condition report, per-method CSVs and 4 figures to "
              << out << "\n";
    return 0;
}

int cmd_synthetic(const std::string& config_arg, const std::string& out,
                  int jobs) {
    ExperimentConfig config;
    if (auto builtin = builtin_experiment_config(config_arg))
        config = *builtin;
    else
        config = load_experiment_config(config_arg);
    if (!out.empty())
        config.out_dir = out;
    if (jobs > 0)
        config.jobs = jobs;

    const AggregateResult result = run_sweep(config);
    const std::string rows_path =
        out_path(config.out_dir, config.name + "_rows.csv");
    write_file(rows_path, sweep_rows_csv(result));
    write_file(out_path(config.out_dir, config.name + "_aggregate.csv"),
               aggregate_csv(result));

    FigureSpec figure;
    figure.kind = FigureKind::f1_vs_param;
    figure.title = "best F1 vs. " + config.sweep;
    figure.x_label = config.sweep;
    figure.y_label = "support F1";
    figure.filename =
        out_path(config.out_dir, config.name + "_f1_vs_" + config.sweep + ".svg");
    for (const std::string& algorithm : config.algorithms) {
        Series s;
        s.name = algorithm;
        for (const AggregateRow& row : result.rows) {
            if (row.algorithm != algorithm)
                continue;
            s.x.push_back(row.sweep_value);
            s.y.push_back(row.mean_best_f1);
            s.band_low.push_back(row.mean_best_f1 - row.std_best_f1);
            s.band_high.push_back(row.mean_best_f1 + row.std_best_f1);
        }
        figure.series.push_back(std::move(s));
    }
    if (figure.series.front().x.size() > 1)
        write_svg(figure);

    long skipped = 0;
    for (const AggregateRow& row : result.rows)
        for (const GridResult& seed_result : row.per_seed)
            skipped += long(seed_result.skipped.size());
    std::cout << aggregate_csv(result);
    std::cout << "wrote " << rows_path << " (skipped cells: " << skipped << ")\n";
    return 0;
}

int cmd_check(const std::string& instance_file, const std::string& generator,
              std::uint64_t seed, Eigen::Index n, Eigen::Index d,
              Eigen::Index k, double rho, double snr, const std::string& out) {
    ProblemInstance instance;
    GroundTruth truth;
    if (!instance_file.empty()) {
        ParsedInstance parsed = load_instance(instance_file);
        if (!parsed.truth)
            throw std::runtime_error(
                "instance file has no ground truth (w*, S); condition checks "
                "need the true model");
        instance = std::move(parsed.instance);
        truth = std::move(*parsed.truth);
    } else if (generator == "example1") {
        std::tie(instance, truth) = gen_example1(seed);
    } else if (generator == "example2") {
        std::tie(instance, truth) = gen_example2(n, d, k, seed);
    } else if (generator == "correlated") {
        SyntheticSpec spec;
        spec.n = n;
        spec.d = d;
        spec.k_true = k;
        spec.rho = rho;
        spec.snr = snr;
        spec.seed = seed;
        std::tie(instance, truth) = gen_correlated(spec);
    } else {
        throw std::runtime_error("unknown generator: " + generator);
    }

    const ConditionReport report = full_condition_report(instance, truth);
    const std::string text = serialize_report(report);
    std::cout << text;
    write_file(out_path(out, "condition_report.txt"), text);
    return 0;
}

int cmd_prox_selftest(long trials, Eigen::Index dim_max, std::uint64_t seed) {
    const SelftestSummary summary = prox_selftest(trials, dim_max, seed);
    std::cout << summary.to_string();
    return summary.passed() ? 0 : 1;
}

int cmd_bound_verify(int count, const std::string& family,
                     std::vector<double> deltas, double alpha_frac, double c,
                     long iters, std::uint64_t seed) {
    if (deltas.empty())
        deltas = {0.0, 0.01, 0.1};
    std::vector<std::pair<ProblemInstance, GroundTruth>> instances;
    std::vector<double> alphas;
    std::uint64_t stream = 0;
    int attempts = 0;
    while (int(instances.size()) < count && attempts < count * 50) {
        ++attempts;
        const std::uint64_t child = derive_seed(seed, stream++);
        std::pair<ProblemInstance, GroundTruth> pair;
        if (family == "example2" || (family == "mixed" && attempts % 2 == 0)) {
            pair = gen_example2(30, 50, 10, child);
        } else {
            SyntheticSpec spec;
            spec.n = 40;
            spec.d = 20;
            spec.k_true = 4;
            spec.rho = 0.3;
            spec.snr = 1.0;
            spec.seed = child;
            pair = gen_correlated(spec);
            pair.first.y_delta = pair.second.y_clean; // noiseless base
            pair.first.delta = 0.0;
        }
        if (!check_assumption1(pair.first, pair.second))
            continue;
        const ConditionReport report =
            full_condition_report(pair.first, pair.second);
        if (!report.a2_holds || !report.alpha_max_defined)
            continue;
        const double delta = deltas[instances.size() % deltas.size()];
        alphas.push_back(alpha_frac * report.alpha_max);
        instances.emplace_back(
            with_noise_level(pair.first, pair.second, delta,
                             derive_seed(child, 1)),
            pair.second);
    }
    if (int(instances.size()) < count)
        throw std::runtime_error("could not assemble enough instances "
                                 "satisfying the recovery conditions");

    const BoundReport report = verify_bound_sweep(instances, alphas, c, iters, 1);
    std::cout << report.to_string();
    const bool ok = report.all_hold();
    std::cout << "early-stopping bound " << (ok ? "holds" : "VIOLATED")
              << " on all accepted instances (min slack " << report.min_slack
              << ")\n";
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-support-norm sparse recovery toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    int jobs = 0;
    std::string out = ".";
    app.add_option("--seed", seed, "base random seed")->capture_default_str();
    app.add_option("--jobs", jobs, "parallel work units (0 = all cores)");
    app.add_option("--out", out, "output directory")->capture_default_str();

    auto* example1 = app.add_subcommand(
        "example1", "correlated five-feature study: paths, errors, figures");
    double ex1_alpha = 0.0;
    long ex1_iters = 20000;
    long ex1_record = 1;
    example1->add_option("--alpha", ex1_alpha,
                         "regularization mix (default: half the admissible cap)");
    example1->add_option("--iters", ex1_iters, "iterations")->capture_default_str();
    example1->add_option("--record-every", ex1_record, "snapshot stride")
        ->capture_default_str();

    auto* synthetic = app.add_subcommand(
        "synthetic", "correlated-design F1 sweep from a config file");
    std::string config_arg;
    synthetic
        ->add_option("--config", config_arg,
                     "config file path or builtin name (fig4a..fig4d)")
        ->required();

    auto* check = app.add_subcommand(
        "check", "evaluate the recovery conditions of an instance");
    std::string instance_file, generator = "example1";
    Eigen::Index chk_n = 30, chk_d = 50, chk_k = 10;
    double chk_rho = 0.5, chk_snr = 1.0;
    check->add_option("--instance-file", instance_file,
                      "instance file (needs w* and S)");
    check->add_option("--generator", generator,
                      "example1 | example2 | correlated")
        ->capture_default_str();
    check->add_option("--n", chk_n, "rows")->capture_default_str();
    check->add_option("--d", chk_d, "columns")->capture_default_str();
    check->add_option("--k", chk_k, "sparsity")->capture_default_str();
    check->add_option("--rho", chk_rho, "feature correlation")->capture_default_str();
    check->add_option("--snr", chk_snr, "signal-to-noise ratio")->capture_default_str();

    auto* selftest = app.add_subcommand(
        "prox-selftest", "randomized prox/norm oracle battery");
    long trials = 200;
    Eigen::Index dim_max = 12;
    selftest->add_option("--trials", trials, "number of trials")
        ->capture_default_str();
    selftest->add_option("--dim-max", dim_max, "maximum dimension")
        ->capture_default_str();

    auto* bound = app.add_subcommand(
        "bound-verify", "check the early-stopping error bound on generated instances");
    int bv_count = 20;
    std::string bv_family = "mixed";
    std::vector<double> bv_deltas;
    double bv_alpha_frac = 0.5, bv_c = 1.0;
    long bv_iters = 2000;
    bound->add_option("--instances", bv_count, "number of instances")
        ->capture_default_str();
    bound->add_option("--family", bv_family, "example2 | correlated | mixed")
        ->capture_default_str();
    bound->add_option("--deltas", bv_deltas, "noise levels (cycled)");
    bound->add_option("--alpha-frac", bv_alpha_frac,
                      "alpha as a fraction of the admissible cap")
        ->capture_default_str();
    bound->add_option("--c", bv_c, "stopping-time constant")->capture_default_str();
    bound->add_option("--iters", bv_iters, "iterations checked")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (example1->parsed())
            return cmd_example1(ex1_alpha, ex1_iters, ex1_record, seed, out);
        if (synthetic->parsed())
            return cmd_synthetic(config_arg, out, jobs);
        if (check->parsed())
            return cmd_check(instance_file, generator, seed, chk_n, chk_d,
                             chk_k, chk_rho, chk_snr, out);
        if (selftest->parsed())
            return cmd_prox_selftest(trials, dim_max, seed);
        if (bound->parsed())
            return cmd_bound_verify(bv_count, bv_family, bv_deltas,
                                    bv_alpha_frac, bv_c, bv_iters, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
