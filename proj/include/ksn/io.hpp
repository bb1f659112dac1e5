#pragma once

#include "ksn/harness.hpp"
#include "ksn/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace ksn {

/// Columnar text format for instances: a header with n, d, delta, seed,
/// then the rows of X, y_delta, and (when known) w* and the support S.
/// Floats use shortest round-trip formatting.
std::string serialize_instance(const ProblemInstance& instance,
                               const GroundTruth* truth = nullptr,
                               std::uint64_t seed = 0);

struct ParsedInstance {
    ProblemInstance instance;
    std::optional<GroundTruth> truth;
    std::uint64_t seed = 0;
};

ParsedInstance parse_instance(std::istream& in);
ParsedInstance load_instance(const std::string& path);

void write_file(const std::string& path, const std::string& contents);

/// Key-value experiment config ("key = value" lines, '#' comments).
/// Documented keys: name, sweep, sweep_values, d, k, n, rho, snr, seeds,
/// algorithms, max_iter, record_every, jobs, out.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

/// Bundled configurations of the synthetic study: fig4a (sweep over n),
/// fig4b (snr), fig4c (rho), fig4d (the snr=3 setting whose per-iteration
/// F1 curves are plotted).
std::optional<ExperimentConfig> builtin_experiment_config(const std::string& name);

std::string format_double_shortest(double v);

} // namespace ksn
