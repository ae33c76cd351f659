// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "kcoll/cli.hpp"
#include "kcoll/collocation.hpp"
#include "kcoll/integral_kernel.hpp"
#include "kcoll/kernel.hpp"
#include "kcoll/reference.hpp"
#include "kcoll/spde.hpp"

using namespace kcoll;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double three_mode(double x) {
    return std::sqrt(2.0) * (std::sin(pi * x) + std::sin(2 * pi * x) + std::sin(3 * pi * x));
}

std::shared_ptr<const IntegralKernelEvaluator> matern_evaluator(double theta = 26.5) {
    return std::make_shared<IntegralKernelEvaluator>(std::make_shared<MaternKernel>(3, theta));
}

void criterion_1() {
    const auto start = Clock::now();
    const IntegralKernelEvaluator ev(std::make_shared<CovarianceKernel>(CovarianceKernel::r1()));
    double worst = 0.0;
    for (int i = 1; i <= 10; ++i)
        for (int j = 1; j <= 10; ++j) {
            const double x = i / 11.0, y = j / 11.0;
            worst = std::max(worst, std::abs(ev.kstar(x, y) - iterated_brownian_bridge(x, y)));
        }
    const double t = seconds_since(start);
    report(1, worst <= 1e-8 && t < 5.0,
           fmt("max |K*_bridge - R2| = %.3e (tol 1e-8), %.2f s", worst, t));
}

void criterion_2() {
    const double theta = 26.5;
    const MaternKernel k(3, theta);
    const double h = 1e-5;
    // Fourth-order central stencil with step h.
    const auto central = [h](const std::function<double(double)>& f, double x) {
        return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
    };
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int pairs = 0;
    while (pairs < 50) {
        const double x = u(rng), y = u(rng);
        if (std::abs(x - y) <= 1e-3) continue;
        ++pairs;
        // (analytic order, lower order differentiated numerically, variable)
        const struct { int a, b, la, lb; bool in_x; } cases[] = {
            {1, 0, 0, 0, true}, {0, 1, 0, 0, false}, {2, 0, 1, 0, true},
            {0, 2, 0, 1, false}, {1, 1, 1, 0, false},
        };
        for (const auto& c : cases) {
            const double fd = c.in_x ? central([&](double s) { return k.eval(s, y, c.la, c.lb); }, x)
                                     : central([&](double s) { return k.eval(x, s, c.la, c.lb); }, y);
            const double an = k.eval(x, y, c.a, c.b);
            worst = std::max(worst, std::abs(an - fd) / std::max(std::abs(an), std::abs(fd)));
        }
    }
    const double expected = 3.0 / (16.0 * std::pow(theta, 5));
    const double diag_err = std::abs(k.eval(0.4, 0.4) - expected) / expected;
    report(2, worst <= 1e-5 && diag_err <= 1e-12,
           fmt("max relative FD error %.3e over 50 pairs (tol 1e-5); K(x,x) relative error %.1e (tol 1e-12)",
               worst, diag_err));
}

void criterion_3() {
    const auto start = Clock::now();
    const double dt = 1.0 / 200.0;
    const auto sys = assemble(uniform_collocation(19), make_step_operator(dt),
                              BoundaryOperator::dirichlet(), matern_evaluator());
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    std::vector<double> a(8);
    for (double& v : a) v = n01(rng);
    const double g0 = n01(rng), g1 = n01(rng);
    const ScalarFn f = [a](double x) {
        double v = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) v += a[i] * std::cos((i + 1) * 1.7 * x + i);
        return v;
    };
    const ScalarFn g = [g0, g1](double x) { return x == 0.0 ? g0 : g1; };
    const auto u = solve_elliptic(sys, f, g);
    const auto y = collocation_data(sys->points(), f, g);
    const double ynorm = y.cwiseAbs().maxCoeff();
    const auto p = make_step_operator(dt);
    double rp = 0.0, rb = 0.0;
    for (double x : sys->points().interior) rp = std::max(rp, std::abs(u.apply(p, x) - f(x)));
    for (double x : sys->points().boundary) rb = std::max(rb, std::abs(u(x) - g(x)));
    const double t = seconds_since(start);
    report(3, rp <= 1e-8 * ynorm && rb <= 1e-8 * ynorm && t < 10.0,
           fmt("|P u - f| = %.2e, |B u - g| = %.2e, bound 1e-8*|y| = %.2e, %.2f s", rp, rb, 1e-8 * ynorm, t));
}

void criterion_4() {
    const auto start = Clock::now();
    const double dt = 1.0 / 800.0;
    std::vector<double> hs, sigmas;
    for (int n : {9, 19, 39, 79}) {
        const auto set = uniform_collocation(n);
        const auto sys = assemble(set, make_step_operator(dt), BoundaryOperator::dirichlet(),
                                  matern_evaluator());
        double worst = 0.0;
        for (int i = 0; i <= 1000; ++i) worst = std::max(worst, power_function(*sys, i / 1000.0));
        hs.push_back(set.fill_distance);
        sigmas.push_back(worst);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < sigmas.size(); ++i) monotone = monotone && sigmas[i] < sigmas[i - 1];
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) mx += std::log(hs[i]), my += std::log(sigmas[i]);
    mx /= hs.size();
    my /= hs.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        sxy += (std::log(hs[i]) - mx) * (std::log(sigmas[i]) - my);
        sxx += (std::log(hs[i]) - mx) * (std::log(hs[i]) - mx);
    }
    const double slope = sxy / sxx;
    const double t = seconds_since(start);
    report(4, slope >= 0.4 && slope <= 1.0 && monotone && t < 120.0,
           fmt("slope %.3f (band [0.4, 1.0]), monotone %s, max sigma %.3e %.3e %.3e %.3e, %.1f s", slope,
               monotone ? "yes" : "no", sigmas[0], sigmas[1], sigmas[2], sigmas[3], t));
}

// Kolmogorov-Smirnov distance of a sample against the standard normal CDF.
double ks_statistic(std::vector<double> z) {
    std::sort(z.begin(), z.end());
    const double n = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double cdf = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
        d = std::max({d, (i + 1) / n - cdf, cdf - i / n});
    }
    return d;
}

void criteria_5_6_7() {
    const auto start = Clock::now();
    const int steps = 200;
    const std::size_t paths = 1000;
    SpdeProblem problem;
    problem.initial_condition = three_mode;
    problem.steps = steps;
    problem.points = uniform_collocation(30);
    NoiseModel noise;
    noise.sigma = 1.0;
    const SpdeSolver solver(problem, noise, {0.5});
    const auto stats = solver.run_ensemble(paths, 0, std::max(1u, std::thread::hardware_concurrency()));
    const auto oracle = SpectralHeatSolution::three_mode_profile(1, 1.0);
    const double t_run = seconds_since(start);

    double worst_ratio = 0.0;
    std::string detail;
    for (double t : {0.25, 1.0}) {
        const std::size_t row = static_cast<std::size_t>(std::lround(t * steps)) - 1;
        double worst_excess = 0.0;
        for (std::size_t k = 0; k < stats.points.size(); ++k) {
            const double x = stats.points[k];
            const double err = std::abs(stats.mean(row, k) - oracle.exact_mean(t, x));
            const double band = 3.0 * std::sqrt(oracle.exact_var(t, x) / paths) + 0.02;
            worst_ratio = std::max(worst_ratio, err / band);
            worst_excess = std::max(worst_excess, err / band);
        }
        detail += fmt("t=%.2f max err/band %.3f; ", t, worst_excess);
    }
    report(5, worst_ratio <= 1.0 && t_run < 300.0, detail + fmt("%.1f s", t_run));

    const std::size_t last = steps - 1;
    const double var = stats.probe_variance(last, 0);
    const double exact = oracle.exact_var(1.0, 0.5);
    const double ratio = var / exact;
    report(6, ratio >= 0.6 && ratio <= 1.1,
           fmt("sample var %.5f / exact var %.5f = %.3f (band [0.6, 1.1])", var, exact, ratio));

    std::vector<double> samples(paths);
    for (std::size_t p = 0; p < paths; ++p) samples[p] = stats.final_probes(p, 0);
    double m = 0.0;
    for (double v : samples) m += v;
    m /= paths;
    double s2 = 0.0;
    for (double v : samples) s2 += (v - m) * (v - m);
    const double sd = std::sqrt(s2 / (paths - 1));
    for (double& v : samples) v = (v - m) / sd;
    const double ks = ks_statistic(samples);
    report(7, ks <= 0.06, fmt("KS statistic %.4f (tol 0.06), %zu paths", ks, paths));
}

void criterion_8() {
    const auto start = Clock::now();
    cli::RunConfig config;
    config.paths = 500;
    config.seed = 0;
    config.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<ConvergenceLevel> levels;
    for (const auto& [n, steps] : config.levels) levels.push_back(cli::run_convergence_level(config, n, steps));
    bool decreasing = true;
    for (std::size_t i = 1; i < levels.size(); ++i)
        decreasing = decreasing && levels[i].rmse_mean < levels[i - 1].rmse_mean;
    const double t = seconds_since(start);
    report(8, decreasing && t < 600.0,
           fmt("rmse_mean %.4g %.4g %.4g (rmse_var %.4g %.4g %.4g), %.1f s", levels[0].rmse_mean,
               levels[1].rmse_mean, levels[2].rmse_mean, levels[0].rmse_var, levels[1].rmse_var,
               levels[2].rmse_var, t));
}

void criterion_9() {
    SpdeProblem problem;
    problem.initial_condition = three_mode;
    problem.steps = 200;
    problem.points = uniform_collocation(30);
    NoiseModel noise;
    noise.sigma = 1.3;
    const SpdeSolver solver(problem, noise);
    bool identical = true;
    for (std::uint64_t path = 0; path < 20; ++path) {
        RngStream a(7, path), b(7, path);
        const auto add = solver.run_path(a);
        const auto mul = solver.run_path_multiplicative([](double) { return 1.3; }, b);
        identical = identical && add.values.data.size() == mul.values.data.size() &&
                    std::memcmp(add.values.data.data(), mul.values.data.data(),
                                add.values.data.size() * sizeof(double)) == 0;
    }
    report(9, identical, fmt("psi = sigma vs additive over 20 paths: %s", identical ? "bitwise identical" : "differ"));
}

void criterion_10() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "kcoll_acceptance";
    fs::create_directories(dir);
    const auto run = [&](const std::string& workers, const fs::path& out) {
        const std::string o = out.string();
        const char* argv[] = {"kcoll", "heat-spde", "--paths", "300", "--steps", "50",
                              "--interior-points", "30", "--seed", "12345", "--workers",
                              workers.c_str(), "--output", o.c_str()};
        std::ostringstream err;
        return cli::main(14, argv, err);
    };
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    bool ok = true;
    std::string reference;
    for (const char* w : {"1", "2", "5", "1"}) {
        const fs::path out = dir / (std::string("heat_w") + w + ".csv");
        ok = ok && run(w, out) == 0;
        const auto text = slurp(out);
        if (reference.empty()) reference = text;
        ok = ok && !text.empty() && text == reference;
    }
    report(10, ok, fmt("heat-spde CSV with --workers 1, 2, 5, 1: %s (%zu bytes)",
                       ok ? "byte-identical" : "differs", reference.size()));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criteria_5_6_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
