#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kcoll/collocation.hpp"
#include "kcoll/rng.hpp"
#include "kcoll/trajectory.hpp"

namespace kcoll {

/// Sine-series solution of the stochastic heat equation
///
///   dU = U_xx dt + sigma dW,   W = sum_k W^k q_k^i phi_k,
///
/// with q_k = 1/(k pi) and phi_k(x) = sqrt(2) sin(k pi x). Each mode is an
/// Ornstein-Uhlenbeck process
///
///   d xi^k = -k^2 pi^2 xi^k dt + sigma q_k^i dW^k,
///
/// so E U_t = sum xi_0^k e^{-k^2 pi^2 t} phi_k and
/// Var U_t = sum sigma^2 q_k^{2i} (1 - e^{-2 k^2 pi^2 t}) / (2 k^2 pi^2) phi_k^2.
class SpectralHeatSolution {
public:
    static constexpr std::size_t kDefaultModes = 200;

    /// `initial_coefficients[k-1]` is xi_0^k; missing modes are zero.
    SpectralHeatSolution(std::vector<double> initial_coefficients, int roughness,
                         double sigma, std::size_t modes = kDefaultModes);

    /// u0 = sqrt(2)(sin pi x + sin 2 pi x + sin 3 pi x): xi_0 = (1, 1, 1, 0, ...).
    static SpectralHeatSolution three_mode_profile(int roughness, double sigma,
                                                   std::size_t modes = kDefaultModes);

    /// xi_0^k = int_0^1 u0 phi_k by composite Gauss-Legendre quadrature.
    static SpectralHeatSolution from_initial_condition(const ScalarFn& u0, int roughness,
                                                       double sigma,
                                                       std::size_t modes = kDefaultModes);

    std::size_t modes() const { return modes_; }
    int roughness() const { return roughness_; }
    double sigma() const { return sigma_; }
    double initial_coefficient(std::size_t k) const;

    static double q(std::size_t k);
    static double phi(std::size_t k, double x);
    /// k^2 pi^2
    static double decay_rate(std::size_t k);
    /// sigma q_k^i: amplitude multiplying dW^k in mode k.
    double noise_amplitude(std::size_t k) const;

    double exact_mean(double t, double x) const;
    double exact_var(double t, double x) const;

    /// u0(x) reconstructed from the coefficients.
    double initial_value(double x) const { return exact_mean(0.0, x); }

private:
    std::vector<double> initial_;
    int roughness_;
    double sigma_;
    std::size_t modes_;
};

double exact_mean(const SpectralHeatSolution& sol, double t, double x);
double exact_var(const SpectralHeatSolution& sol, double t, double x);

/// exact_mean / exact_var tabulated on (times x points).
Trajectory exact_mean_table(const SpectralHeatSolution& sol, std::span<const double> times,
                            std::span<const double> points);
Trajectory exact_var_table(const SpectralHeatSolution& sol, std::span<const double> times,
                           std::span<const double> points);

/// Modal implicit-Euler path with its own Brownian increments:
///   xi^k_j = (xi^k_{j-1} + sigma q_k^i dW^k_j) / (1 + dt k^2 pi^2),
/// dW^k_j ~ N(0, dt), reconstructed on `grid`. Row j-1 holds t_j, j = 1..n.
Trajectory spectral_reference_path(const SpectralHeatSolution& sol, int n_steps,
                                   double horizon, std::span<const double> grid,
                                   RngStream& stream);

/// sqrt( (1/(nN)) sum_j sum_k (U(t_j,x_k) - V(t_j,x_k))^2 / ||U(t_j, .)||_inf^2 ).
/// Throws InvalidArgument on shape mismatch or a zero row of `exact`.
double relative_rmse(const Trajectory& exact, const Trajectory& approx);

}  // namespace kcoll
