#include "ksn/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ksn {

std::string format_double_shortest(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

namespace {

std::string join_vector(const Vector& v) {
    std::ostringstream os;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        os << (i ? " " : "") << format_double_shortest(v[i]);
    return os.str();
}

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> tokens;
    std::string token;
    while (is >> token)
        tokens.push_back(token);
    return tokens;
}

double parse_number(const std::string& token, const std::string& context) {
    try {
        size_t pos = 0;
        const double v = std::stod(token, &pos);
        if (pos != token.size())
            throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("cannot parse number '" + token + "' in " +
                                 context);
    }
}

} // namespace

std::string serialize_instance(const ProblemInstance& instance,
                               const GroundTruth* truth, std::uint64_t seed) {
    instance.validate();
    std::ostringstream os;
    os << "n " << instance.n() << "\n"
       << "d " << instance.d() << "\n"
       << "delta " << format_double_shortest(instance.delta) << "\n"
       << "seed " << seed << "\n";
    for (Eigen::Index i = 0; i < instance.n(); ++i)
        os << "X " << join_vector(instance.X.row(i).transpose()) << "\n";
    os << "y " << join_vector(instance.y_delta) << "\n";
    if (truth) {
        os << "wstar " << join_vector(truth->w_star) << "\n";
        os << "S";
        for (Eigen::Index j : truth->support)
            os << ' ' << j;
        os << "\n";
    }
    return os.str();
}

ParsedInstance parse_instance(std::istream& in) {
    ParsedInstance parsed;
    Eigen::Index n = -1, d = -1;
    std::vector<Vector> x_rows;
    Vector y;
    std::optional<Vector> wstar;
    std::optional<IndexSet> support;

    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        const auto tokens = tokenize(line);
        if (tokens.empty())
            continue;
        const std::string context = "line " + std::to_string(line_no);
        const std::string& key = tokens[0];
        auto values = [&](size_t expected) {
            if (tokens.size() != expected + 1)
                throw std::runtime_error("wrong field count for '" + key +
                                         "' at " + context);
            Vector v(static_cast<Eigen::Index>(expected));
            for (size_t i = 0; i < expected; ++i)
                v[static_cast<Eigen::Index>(i)] =
                    parse_number(tokens[i + 1], context);
            return v;
        };

        if (key == "n")
            n = static_cast<Eigen::Index>(parse_number(tokens.at(1), context));
        else if (key == "d")
            d = static_cast<Eigen::Index>(parse_number(tokens.at(1), context));
        else if (key == "delta")
            parsed.instance.delta = parse_number(tokens.at(1), context);
        else if (key == "seed")
            parsed.seed = static_cast<std::uint64_t>(
                parse_number(tokens.at(1), context));
        else if (key == "X") {
            if (d < 1)
                throw std::runtime_error("X row before d at " + context);
            x_rows.push_back(values(static_cast<size_t>(d)));
        } else if (key == "y") {
            if (n < 1)
                throw std::runtime_error("y before n at " + context);
            y = values(static_cast<size_t>(n));
        } else if (key == "wstar") {
            if (d < 1)
                throw std::runtime_error("wstar before d at " + context);
            wstar = values(static_cast<size_t>(d));
        } else if (key == "S") {
            IndexSet s;
            for (size_t i = 1; i < tokens.size(); ++i)
                s.push_back(static_cast<Eigen::Index>(
                    parse_number(tokens[i], context)));
            support = std::move(s);
        } else {
            throw std::runtime_error("unknown key '" + key + "' at " + context);
        }
    }

    if (n < 1 || d < 1)
        throw std::runtime_error("instance file must declare n and d");
    if (static_cast<Eigen::Index>(x_rows.size()) != n)
        throw std::runtime_error("expected " + std::to_string(n) + " X rows, got " +
                                 std::to_string(x_rows.size()));
    if (y.size() != n)
        throw std::runtime_error("missing or mis-sized y row");

    parsed.instance.X.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        parsed.instance.X.row(i) = x_rows[static_cast<size_t>(i)].transpose();
    parsed.instance.y_delta = std::move(y);
    parsed.instance.validate();

    if (wstar && support) {
        GroundTruth truth;
        truth.w_star = std::move(*wstar);
        truth.support = std::move(*support);
        truth.y_clean = parsed.instance.X * truth.w_star;
        parsed.truth = std::move(truth);
    } else if (wstar || support) {
        throw std::runtime_error("wstar and S must be given together");
    }
    return parsed;
}

ParsedInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open instance file: " + path);
    return parse_instance(in);
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << contents;
}

namespace {

std::vector<double> parse_number_list(const std::string& value,
                                      const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ','))
        out.push_back(parse_number(item, "key '" + key + "'"));
    if (out.empty())
        throw std::runtime_error("empty list for key '" + key + "'");
    return out;
}

std::vector<std::string> parse_string_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ',')) {
        // trim
        const auto begin = item.find_first_not_of(" \t");
        const auto end = item.find_last_not_of(" \t");
        if (begin != std::string::npos)
            out.push_back(item.substr(begin, end - begin + 1));
    }
    return out;
}

} // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig config;
    config.algorithms = {"irksn", "iht", "lasso", "elasticnet", "ksn",
                         "omp",   "srdi", "irosr", "ircr"};

    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (!tokenize(line).empty())
                throw std::runtime_error("malformed config line " +
                                         std::to_string(line_no) +
                                         " (expected key = value)");
            continue;
        }
        auto trim = [](std::string s) {
            const auto begin = s.find_first_not_of(" \t");
            const auto end = s.find_last_not_of(" \t");
            return begin == std::string::npos
                       ? std::string()
                       : s.substr(begin, end - begin + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error("malformed config line " +
                                     std::to_string(line_no));

        if (key == "name")
            config.name = value;
        else if (key == "sweep")
            config.sweep = value;
        else if (key == "sweep_values")
            config.sweep_values = parse_number_list(value, key);
        else if (key == "d")
            config.base.d = static_cast<Eigen::Index>(parse_number(value, key));
        else if (key == "k") {
            config.k = static_cast<Eigen::Index>(parse_number(value, key));
            config.base.k_true = config.k;
        } else if (key == "n")
            config.base.n = static_cast<Eigen::Index>(parse_number(value, key));
        else if (key == "rho")
            config.base.rho = parse_number(value, key);
        else if (key == "snr")
            config.base.snr = parse_number(value, key);
        else if (key == "seeds") {
            config.seeds.clear();
            for (double v : parse_number_list(value, key))
                config.seeds.push_back(static_cast<std::uint64_t>(v));
        } else if (key == "algorithms")
            config.algorithms = parse_string_list(value);
        else if (key == "max_iter")
            config.max_iter = static_cast<long>(parse_number(value, key));
        else if (key == "record_every")
            config.record_every = static_cast<long>(parse_number(value, key));
        else if (key == "irksn_norm") {
            if (value == "spectral")
                config.irksn_norm = MatrixNormChoice::spectral;
            else if (value == "nuclear")
                config.irksn_norm = MatrixNormChoice::nuclear;
            else
                throw std::runtime_error(
                    "config key 'irksn_norm' must be spectral or nuclear");
        } else if (key == "jobs")
            config.jobs = static_cast<int>(parse_number(value, key));
        else if (key == "out")
            config.out_dir = value;
        else
            throw std::runtime_error("unknown config key '" + key + "' at line " +
                                     std::to_string(line_no));
    }
    if (config.seeds.empty())
        throw std::runtime_error("config must list at least one seed");
    config.validate();
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path);
    return parse_experiment_config(in);
}

std::optional<ExperimentConfig> builtin_experiment_config(
    const std::string& name) {
    ExperimentConfig config;
    config.name = name;
    config.base.d = 50;
    config.base.k_true = 10;
    config.k = 10;
    config.seeds = {1, 2, 3, 4, 5};
    config.algorithms = {"irksn", "iht", "lasso", "elasticnet", "ksn",
                         "omp",   "srdi", "irosr", "ircr"};
    config.max_iter = 20000;
    config.record_every = 5;

    if (name == "fig4a") {
        config.sweep = "n";
        config.sweep_values = {10, 30, 50, 70, 90};
        config.base.rho = 0.5;
        config.base.snr = 1.0;
        config.base.n = 30;
        return config;
    }
    if (name == "fig4b") {
        config.sweep = "snr";
        config.sweep_values = {0.1, 0.5, 1.0, 2.0, 3.0};
        config.base.rho = 0.5;
        config.base.n = 30;
        config.base.snr = 1.0;
        return config;
    }
    if (name == "fig4c") {
        config.sweep = "rho";
        config.sweep_values = {0.1, 0.3, 0.5, 0.7, 0.9};
        config.base.snr = 1.0;
        config.base.n = 30;
        config.base.rho = 0.5;
        return config;
    }
    if (name == "fig4d") {
        // the late-training comparison setting; a single sweep value
        config.sweep = "snr";
        config.sweep_values = {3.0};
        config.base.rho = 0.5;
        config.base.n = 30;
        config.base.snr = 3.0;
        config.algorithms = {"irksn", "iht", "srdi", "irosr", "ircr"};
        return config;
    }
    return std::nullopt;
}

} // namespace ksn
