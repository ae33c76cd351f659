#include "kcoll/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "kcoll/collocation.hpp"
#include "kcoll/error.hpp"
#include "kcoll/reference.hpp"
#include "kcoll/spde.hpp"

namespace kcoll::cli {

namespace {

int default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

Subcommand parse_subcommand(const std::string& name) {
    if (name == "interpolate") return Subcommand::interpolate;
    if (name == "elliptic") return Subcommand::elliptic;
    if (name == "heat-spde") return Subcommand::heat_spde;
    if (name == "converge") return Subcommand::converge;
    throw ConfigError("subcommand: unknown value '" + name +
                      "' (expected interpolate, elliptic, heat-spde or converge)");
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last || text.empty())
        throw ConfigError(key + ": cannot parse '" + text + "' as a number");
    return value;
}

int parse_noise(const std::string& key, const std::string& text) {
    if (text == "r1") return 1;
    if (text == "r2") return 2;
    throw ConfigError(key + ": expected r1 or r2, got '" + text + "'");
}

std::vector<std::pair<int, int>> parse_levels(const std::string& key, const std::string& text) {
    std::vector<std::pair<int, int>> levels;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError(key + ": expected N:steps pairs separated by commas");
        levels.emplace_back(parse_number<int>(key, trim(item.substr(0, colon))),
                            parse_number<int>(key, trim(item.substr(colon + 1))));
    }
    return levels;
}

std::string levels_text(const std::vector<std::pair<int, int>>& levels) {
    std::string out;
    for (const auto& [n, steps] : levels) {
        if (!out.empty()) out += ',';
        out += fmt::format("{}:{}", n, steps);
    }
    return out;
}

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "subcommand") c.subcommand = parse_subcommand(value);
    else if (key == "m") c.m = parse_number<int>(key, value);
    else if (key == "theta") c.theta = parse_number<double>(key, value);
    else if (key == "n_interior") c.n_interior = parse_number<int>(key, value);
    else if (key == "T") c.horizon = parse_number<double>(key, value);
    else if (key == "steps") c.steps = parse_number<int>(key, value);
    else if (key == "noise") c.noise = parse_noise(key, value);
    else if (key == "sigma") c.sigma = parse_number<double>(key, value);
    else if (key == "paths") c.paths = parse_number<int>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "panels") c.panels = parse_number<int>(key, value);
    else if (key == "nodes") c.nodes = parse_number<int>(key, value);
    else if (key == "workers") c.workers = parse_number<int>(key, value);
    else if (key == "epsilon") c.epsilon = parse_number<double>(key, value);
    else if (key == "eval_points") c.eval_points = parse_number<int>(key, value);
    else if (key == "levels") c.levels = parse_levels(key, value);
    else if (key == "output") c.output = value;
    else throw ConfigError(key + ": unknown configuration key");
}

}  // namespace

std::string to_string(Subcommand s) {
    switch (s) {
        case Subcommand::interpolate: return "interpolate";
        case Subcommand::elliptic: return "elliptic";
        case Subcommand::heat_spde: return "heat-spde";
        case Subcommand::converge: return "converge";
    }
    return "?";
}

std::vector<std::string> apply_config_text(RunConfig& config, const std::string& text) {
    std::vector<std::string> keys;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(fmt::format("config line {}: expected key=value", line_no));
        keys.push_back(trim(line.substr(0, eq)));
        set_key(config, keys.back(), trim(line.substr(eq + 1)));
    }
    return keys;
}

void validate(const RunConfig& c) {
    const auto require = [](bool ok, const char* field, const std::string& what) {
        if (!ok) throw ConfigError(std::string(field) + ": " + what);
    };
    require(c.m >= 2, "m", "must be an integer >= 2");
    require(c.theta > 0.0 && std::isfinite(c.theta), "theta", "must be positive");
    require(c.n_interior >= 1, "n_interior", "must be at least 1");
    require(c.horizon > 0.0 && std::isfinite(c.horizon), "T", "must be positive");
    require(c.steps >= 1, "steps", "must be at least 1");
    require(c.noise == 1 || c.noise == 2, "noise", "must be r1 or r2");
    require(c.sigma >= 0.0 && std::isfinite(c.sigma), "sigma", "must be non-negative");
    require(c.paths >= 2, "paths", "must be at least 2");
    require(c.panels >= 1, "panels", "must be at least 1");
    require(c.nodes >= 1 && c.nodes <= 64, "nodes", "must be in 1..64");
    require(c.workers >= 1, "workers", "must be at least 1");
    require(c.epsilon > 0.0, "epsilon", "must be positive");
    require(c.eval_points >= 2, "eval_points", "must be at least 2");
    require(!c.output.empty(), "output", "must not be empty");
    for (const auto& [n, steps] : c.levels)
        require(n >= 1 && steps >= 1, "levels", "entries must be positive N:steps pairs");
    if (c.subcommand == Subcommand::converge)
        require(c.levels.size() >= 2, "levels", "need at least two refinement levels");
}

RunConfig parse_config(int argc, const char* const* argv) {
    CLI::App app{"Kernel-based collocation solver for elliptic PDEs and the stochastic heat "
                 "equation on (0, 1)"};
    std::string subcommand;
    std::string config_path;
    std::uint64_t seed = 0;
    int paths = 0, steps = 0, n_interior = 0, workers = 0;
    double theta = 0.0, sigma = 0.0;
    std::string noise, output;

    app.add_option("subcommand", subcommand, "interpolate | elliptic | heat-spde | converge");
    app.add_option("--config", config_path, "flat key=value configuration file");
    auto* o_seed = app.add_option("--seed", seed, "master seed (default 0)");
    auto* o_paths = app.add_option("--paths", paths, "number of Monte-Carlo paths");
    auto* o_steps = app.add_option("--steps", steps, "number of implicit-Euler steps");
    auto* o_points = app.add_option("--interior-points", n_interior, "interior collocation points");
    auto* o_theta = app.add_option("--theta", theta, "Matern shape parameter");
    auto* o_sigma = app.add_option("--sigma", sigma, "noise amplitude");
    auto* o_noise = app.add_option("--noise", noise, "spatial covariance: r1 | r2");
    auto* o_workers = app.add_option("--workers", workers, "worker threads (default: cores)");
    auto* o_output = app.add_option("--output", output, "output CSV path ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        throw;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("usage: ") + e.what());
    }

    RunConfig config;
    config.workers = default_workers();
    bool have_subcommand = false;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("config: cannot read '" + config_path + "'");
        std::stringstream text;
        text << in.rdbuf();
        const auto keys = apply_config_text(config, text.str());
        have_subcommand = std::find(keys.begin(), keys.end(), "subcommand") != keys.end();
    }
    if (!subcommand.empty()) {
        config.subcommand = parse_subcommand(subcommand);
        have_subcommand = true;
    }
    if (!have_subcommand) throw ConfigError("subcommand: missing (interpolate, elliptic, heat-spde, converge)");

    if (o_seed->count()) config.seed = seed;
    if (o_paths->count()) config.paths = paths;
    if (o_steps->count()) config.steps = steps;
    if (o_points->count()) config.n_interior = n_interior;
    if (o_theta->count()) config.theta = theta;
    if (o_sigma->count()) config.sigma = sigma;
    if (o_noise->count()) config.noise = parse_noise("noise", noise);
    if (o_workers->count()) config.workers = workers;
    if (o_output->count()) config.output = output;

    validate(config);
    return config;
}

std::string describe(const RunConfig& c) {
    return fmt::format(
        "subcommand={} m={} theta={} n_interior={} T={} steps={} noise=r{} sigma={} "
        "paths={} seed={} panels={} nodes={} workers={} epsilon={} eval_points={} "
        "levels={} output={}",
        to_string(c.subcommand), c.m, c.theta, c.n_interior, c.horizon, c.steps, c.noise,
        c.sigma, c.paths, c.seed, c.panels, c.nodes, c.workers, c.epsilon, c.eval_points,
        levels_text(c.levels), c.output);
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

double initial_condition(double x) {
    using std::numbers::pi;
    return std::numbers::sqrt2 * (std::sin(pi * x) + std::sin(2 * pi * x) + std::sin(3 * pi * x));
}

double initial_condition_second_derivative(double x) {
    using std::numbers::pi;
    double acc = 0.0;
    for (int k = 1; k <= 3; ++k) acc -= (k * pi) * (k * pi) * std::sin(k * pi * x);
    return std::numbers::sqrt2 * acc;
}

std::vector<double> eval_grid(int count) {
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) xs[static_cast<std::size_t>(i)] = static_cast<double>(i) / (count - 1);
    return xs;
}

CovarianceKernel noise_kernel(int variant) {
    return variant == 2 ? CovarianceKernel::r2() : CovarianceKernel::r1();
}

SpdeProblem heat_problem(const RunConfig& c, int n_interior, int steps) {
    SpdeProblem problem;
    problem.initial_condition = initial_condition;
    problem.horizon = c.horizon;
    problem.steps = steps;
    problem.points = uniform_collocation(n_interior);
    problem.kernel_m = c.m;
    problem.kernel_theta = c.theta;
    problem.quadrature = {c.panels, c.nodes};
    return problem;
}

NoiseModel noise_model(const RunConfig& c) {
    NoiseModel model;
    model.covariance = noise_kernel(c.noise);
    model.sigma = c.sigma;
    return model;
}

std::shared_ptr<const IntegralKernelEvaluator> make_evaluator(const RunConfig& c) {
    return std::make_shared<IntegralKernelEvaluator>(std::make_shared<MaternKernel>(c.m, c.theta),
                                                     QuadratureSettings{c.panels, c.nodes});
}

void run_interpolate(const RunConfig& c) {
    const CollocationSet set = uniform_collocation(c.n_interior);
    const auto pts = set.points();
    std::vector<double> values;
    values.reserve(pts.size());
    for (double x : pts) values.push_back(initial_condition(x));
    const auto interp = min_norm_interpolant(pts, values, std::make_shared<MaternKernel>(c.m, c.theta));
    std::vector<std::vector<double>> rows;
    for (double x : eval_grid(c.eval_points)) rows.push_back({x, initial_condition(x), interp(x)});
    emit_table_csv({"x", "exact", "interpolant"}, rows, c.output);
}

void run_elliptic(const RunConfig& c) {
    const double dt = c.horizon / c.steps;
    const auto system = assemble(uniform_collocation(c.n_interior), make_step_operator(dt),
                                 BoundaryOperator::dirichlet(), make_evaluator(c));
    const auto f = [dt](double x) {
        return initial_condition(x) - dt * initial_condition_second_derivative(x);
    };
    const auto estimator = solve_elliptic(system, f, [](double) { return 0.0; });
    std::vector<std::vector<double>> rows;
    for (double x : eval_grid(c.eval_points))
        rows.push_back({x, initial_condition(x), estimator(x), power_function(*system, x),
                        error_probability(*system, x, c.epsilon)});
    emit_table_csv({"x", "exact", "estimate", "sigma", "error_probability"}, rows, c.output);
}

void run_heat(const RunConfig& c) {
    const SpdeSolver solver(heat_problem(c, c.n_interior, c.steps), noise_model(c));
    const auto stats = solver.run_ensemble(static_cast<std::size_t>(c.paths), c.seed,
                                           static_cast<unsigned>(c.workers));
    emit_stats_csv(stats, SpectralHeatSolution::three_mode_profile(c.noise, c.sigma), c.output);
}

void run_converge(const RunConfig& c) {
    std::vector<ConvergenceLevel> levels;
    for (const auto& [n, steps] : c.levels) levels.push_back(run_convergence_level(c, n, steps));
    emit_convergence_csv(levels, c.output);
}

}  // namespace

ConvergenceLevel run_convergence_level(const RunConfig& c, int n_interior, int steps) {
    const SpdeSolver solver(heat_problem(c, n_interior, steps), noise_model(c));
    const auto stats = solver.run_ensemble(static_cast<std::size_t>(c.paths), c.seed,
                                           static_cast<unsigned>(c.workers));
    const auto oracle = SpectralHeatSolution::three_mode_profile(c.noise, c.sigma);

    ConvergenceLevel level;
    level.h = solver.problem().points.fill_distance;
    level.dt = solver.problem().delta_t();
    level.rmse_mean = relative_rmse(exact_mean_table(oracle, stats.times, stats.points), stats.mean);
    level.rmse_var = relative_rmse(exact_var_table(oracle, stats.times, stats.points), stats.variance);
    for (double x : eval_grid(c.eval_points))
        level.max_sigma = std::max(level.max_sigma, power_function(*solver.system(), x));
    return level;
}

void run(const RunConfig& config) {
    validate(config);
    switch (config.subcommand) {
        case Subcommand::interpolate: run_interpolate(config); break;
        case Subcommand::elliptic: run_elliptic(config); break;
        case Subcommand::heat_spde: run_heat(config); break;
        case Subcommand::converge: run_converge(config); break;
    }
}

int main(int argc, const char* const* argv, std::ostream& err) {
    RunConfig config;
    try {
        config = parse_config(argc, argv);
    } catch (const CLI::CallForHelp&) {
        return kSuccess;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    err << "config: " << describe(config) << '\n' << "seed: " << config.seed << '\n';
    try {
        run(config);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const UnsupportedError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    }
    return kSuccess;
}

}  // namespace kcoll::cli
