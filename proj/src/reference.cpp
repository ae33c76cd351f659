#include "kcoll/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kcoll/error.hpp"
#include "kcoll/quadrature.hpp"

namespace kcoll {

SpectralHeatSolution::SpectralHeatSolution(std::vector<double> initial_coefficients,
                                           int roughness, double sigma, std::size_t modes)
    : initial_(std::move(initial_coefficients)),
      roughness_(roughness),
      sigma_(sigma),
      modes_(modes) {
    if (roughness != 1 && roughness != 2)
        throw InvalidArgument("noise roughness index must be 1 or 2");
    if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be non-negative");
    if (modes == 0) throw InvalidArgument("spectral solution needs at least one mode");
    initial_.resize(modes_, 0.0);
}

SpectralHeatSolution SpectralHeatSolution::three_mode_profile(int roughness, double sigma,
                                                              std::size_t modes) {
    return SpectralHeatSolution({1.0, 1.0, 1.0}, roughness, sigma, modes);
}

SpectralHeatSolution SpectralHeatSolution::from_initial_condition(const ScalarFn& u0,
                                                                  int roughness, double sigma,
                                                                  std::size_t modes) {
    // Resolve sin(k pi x) up to k = modes with a few nodes per half-wave.
    const int panels = static_cast<int>(std::max<std::size_t>(64, modes));
    const QuadratureRule rule = composite_rule(panels, 10);
    std::vector<double> values(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) values[q] = u0(rule.nodes[q]);
    std::vector<double> coeffs(modes);
    for (std::size_t k = 1; k <= modes; ++k) {
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
            acc += rule.weights[q] * values[q] * phi(k, rule.nodes[q]);
        coeffs[k - 1] = acc;
    }
    return SpectralHeatSolution(std::move(coeffs), roughness, sigma, modes);
}

double SpectralHeatSolution::initial_coefficient(std::size_t k) const {
    return k >= 1 && k <= modes_ ? initial_[k - 1] : 0.0;
}

double SpectralHeatSolution::q(std::size_t k) {
    return 1.0 / (static_cast<double>(k) * std::numbers::pi);
}

double SpectralHeatSolution::phi(std::size_t k, double x) {
    return std::numbers::sqrt2 * std::sin(static_cast<double>(k) * std::numbers::pi * x);
}

double SpectralHeatSolution::decay_rate(std::size_t k) {
    const double kp = static_cast<double>(k) * std::numbers::pi;
    return kp * kp;
}

double SpectralHeatSolution::noise_amplitude(std::size_t k) const {
    return sigma_ * std::pow(q(k), roughness_);
}

double SpectralHeatSolution::exact_mean(double t, double x) const {
    if (t < 0.0) throw InvalidArgument("time must be non-negative");
    double acc = 0.0;
    for (std::size_t k = 1; k <= modes_; ++k) {
        const double c = initial_[k - 1];
        if (c != 0.0) acc += c * std::exp(-decay_rate(k) * t) * phi(k, x);
    }
    return acc;
}

double SpectralHeatSolution::exact_var(double t, double x) const {
    if (t < 0.0) throw InvalidArgument("time must be non-negative");
    double acc = 0.0;
    for (std::size_t k = 1; k <= modes_; ++k) {
        const double lambda = decay_rate(k);
        const double amp = noise_amplitude(k);
        const double p = phi(k, x);
        acc += amp * amp * (-std::expm1(-2.0 * lambda * t)) / (2.0 * lambda) * p * p;
    }
    return acc;
}

double exact_mean(const SpectralHeatSolution& sol, double t, double x) {
    return sol.exact_mean(t, x);
}

double exact_var(const SpectralHeatSolution& sol, double t, double x) {
    return sol.exact_var(t, x);
}

Trajectory exact_mean_table(const SpectralHeatSolution& sol, std::span<const double> times,
                            std::span<const double> points) {
    Trajectory out(times.size(), points.size());
    for (std::size_t j = 0; j < times.size(); ++j)
        for (std::size_t k = 0; k < points.size(); ++k)
            out(j, k) = sol.exact_mean(times[j], points[k]);
    return out;
}

Trajectory exact_var_table(const SpectralHeatSolution& sol, std::span<const double> times,
                           std::span<const double> points) {
    Trajectory out(times.size(), points.size());
    for (std::size_t j = 0; j < times.size(); ++j)
        for (std::size_t k = 0; k < points.size(); ++k)
            out(j, k) = sol.exact_var(times[j], points[k]);
    return out;
}

Trajectory spectral_reference_path(const SpectralHeatSolution& sol, int n_steps,
                                   double horizon, std::span<const double> grid,
                                   RngStream& stream) {
    if (n_steps < 1) throw InvalidArgument("reference path needs at least one step");
    if (!(horizon > 0.0)) throw InvalidArgument("time horizon must be positive");
    const std::size_t modes = sol.modes();
    const double dt = horizon / n_steps;
    const double sqrt_dt = std::sqrt(dt);

    std::vector<double> damping(modes), amplitude(modes), coeff(modes);
    for (std::size_t k = 1; k <= modes; ++k) {
        damping[k - 1] = 1.0 / (1.0 + dt * SpectralHeatSolution::decay_rate(k));
        amplitude[k - 1] = sol.noise_amplitude(k) * sqrt_dt;
        coeff[k - 1] = sol.initial_coefficient(k);
    }
    Trajectory basis(modes, grid.size());
    for (std::size_t k = 1; k <= modes; ++k)
        for (std::size_t g = 0; g < grid.size(); ++g)
            basis(k - 1, g) = SpectralHeatSolution::phi(k, grid[g]);

    Trajectory out(static_cast<std::size_t>(n_steps), grid.size());
    for (std::size_t j = 0; j < static_cast<std::size_t>(n_steps); ++j) {
        for (std::size_t k = 0; k < modes; ++k)
            coeff[k] = (coeff[k] + amplitude[k] * stream.normal()) * damping[k];
        auto row = out.row(j);
        for (std::size_t k = 0; k < modes; ++k) {
            const auto b = basis.row(k);
            for (std::size_t g = 0; g < grid.size(); ++g) row[g] += coeff[k] * b[g];
        }
    }
    return out;
}

double relative_rmse(const Trajectory& exact, const Trajectory& approx) {
    if (exact.rows != approx.rows || exact.cols != approx.cols)
        throw InvalidArgument("trajectory shapes differ");
    if (exact.rows == 0 || exact.cols == 0) throw InvalidArgument("empty trajectory");
    double acc = 0.0;
    for (std::size_t j = 0; j < exact.rows; ++j) {
        double sup = 0.0;
        for (double v : exact.row(j)) sup = std::max(sup, std::abs(v));
        if (sup == 0.0)
            throw InvalidArgument("exact trajectory row " + std::to_string(j) +
                                  " has zero sup-norm");
        const double inv = 1.0 / (sup * sup);
        for (std::size_t k = 0; k < exact.cols; ++k) {
            const double d = exact(j, k) - approx(j, k);
            acc += d * d * inv;
        }
    }
    return std::sqrt(acc / static_cast<double>(exact.rows * exact.cols));
}

}  // namespace kcoll
