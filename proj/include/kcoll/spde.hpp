#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "kcoll/collocation.hpp"
#include "kcoll/kernel.hpp"
#include "kcoll/rng.hpp"
#include "kcoll/trajectory.hpp"

namespace kcoll {

/// Spatially coloured Gaussian noise xi ~ N(0, sigma^2 dt R(x_j, x_k)).
struct NoiseModel {
    CovarianceKernel covariance = CovarianceKernel::r1();
    double sigma = 1.0;
    double delta_t = 1.0;
};

/// Samples the noise at the interior collocation points.
///
/// The unit covariance Psi_0 = dt R is factored once (Psi_0 + jitter I = L L^T,
/// jitter starting at 1e-12 max diag and growing tenfold, three attempts);
/// a draw is the shape L z scaled by sigma, or by diag(psi(u)) for
/// multiplicative noise.
class NoiseSampler {
public:
    static constexpr double kInitialJitter = 1e-12;
    static constexpr int kJitterAttempts = 3;

    NoiseSampler(const NoiseModel& model, std::span<const double> points);

    std::size_t size() const { return n_; }
    double sigma() const { return sigma_; }
    double jitter() const { return jitter_; }

    /// Row-major lower-triangular factor of dt R + jitter I.
    std::span<const double> factor() const { return factor_; }
    /// dt R at the points, row-major.
    std::span<const double> covariance() const { return covariance_; }

    /// out = L z with z drawn from `stream` (n standard normals).
    void sample_shape(RngStream& stream, std::span<double> out) const;

    /// out = sigma L z.
    void sample(RngStream& stream, std::span<double> out) const;

private:
    std::size_t n_;
    double sigma_;
    double jitter_ = 0.0;
    std::vector<double> covariance_;
    std::vector<double> factor_;
};

/// One additive noise vector at the interior points of `points`.
std::vector<double> sample_noise(const NoiseModel& model, const CollocationSet& points,
                                 RngStream& stream);

/// Elliptic problem with additive noise on the interior data:
/// y_xi = (f(x_j) + xi_j; g(x_{N+k})), c = K*_PB^{-1} y_xi.
Estimator solve_elliptic_spde(const SystemPtr& system, const ScalarFn& f, const ScalarFn& g,
                              std::span<const double> noise);

/// Step matrix A = B~ K*_PB^{-1} (N x (N+M)), where the rows of B~ are k_PB(x_j)^T
/// at the interior points. Applying A to a stacked data vector evaluates the
/// collocation solution for that data at the interior points.
class StepOperator {
public:
    explicit StepOperator(SystemPtr system);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const CollocationSystem& system() const { return *system_; }

    /// Row-major A.
    std::span<const double> matrix() const { return matrix_; }
    Eigen::MatrixXd as_matrix() const;

    /// out = A v, |v| = N + M, |out| = N.
    void apply(std::span<const double> v, std::span<double> out) const;

    /// Number of apply() calls so far (all threads).
    std::size_t applications() const { return applications_.load(); }

private:
    SystemPtr system_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> matrix_;
    mutable std::atomic<std::size_t> applications_{0};
};

StepOperator precompute_step(const SystemPtr& system);

/// Row-major (|xs| x (N+M)) matrix k_PB(x)^T K*_PB^{-1}; evaluates the
/// collocation solution at arbitrary points from a stacked data vector.
std::vector<double> evaluation_rows(const CollocationSystem& system,
                                    std::span<const double> xs);

/// dU = D U_xx dt + sigma dW on (0, 1), U = 0 on {0, 1}, U(0) = u0, up to T.
struct SpdeProblem {
    ScalarFn initial_condition;
    double horizon = 1.0;
    int steps = 1;
    double diffusion = 1.0;
    CollocationSet points;
    int kernel_m = 3;
    double kernel_theta = 26.5;
    QuadratureSettings quadrature{};

    double delta_t() const { return horizon / steps; }
    /// Throws InvalidArgument on n < 1, T <= 0 or u0 not vanishing at {0, 1}.
    void validate() const;
};

/// Trajectory of one Monte-Carlo path: values(j-1, k) = u^j(x_k) for j = 1..n.
struct PathResult {
    Trajectory values;
    std::vector<double> initial;
    Trajectory probes;  // values at extra evaluation points, same time rows
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
};

/// Per-(t_j, x_k) sample mean and variance (divisor s) over s paths.
struct EnsembleStats {
    std::vector<double> times;
    std::vector<double> points;
    std::vector<double> probe_points;
    Trajectory mean;
    Trajectory variance;
    Trajectory probe_mean;
    Trajectory probe_variance;
    Trajectory final_values;  // (path, point) at t = T
    Trajectory final_probes;  // (path, probe) at t = T
    std::size_t paths = 0;
    std::uint64_t master_seed = 0;
};

/// Running mean / second moment in path-index order (Welford updates), so
/// results depend only on the order in which paths are added.
class EnsembleAccumulator {
public:
    EnsembleAccumulator(std::size_t steps, std::size_t points, std::size_t probes,
                        std::size_t expected_paths = 0);

    void add(const PathResult& path);
    std::size_t count() const { return count_; }
    EnsembleStats finish(std::vector<double> times, std::vector<double> points,
                         std::vector<double> probe_points) const;

private:
    std::size_t count_ = 0;
    Trajectory mean_, m2_, probe_mean_, probe_m2_;
    std::vector<double> final_values_, final_probes_;
    std::size_t points_, probes_;
};

/// Multiplicative noise amplitude psi(u).
using NoiseAmplitude = std::function<double(double)>;

/// Implicit-Euler kernel collocation solver for the parabolic problem.
///
/// Setup assembles K*_PB for P = I - dt D d^2/dx^2 with Dirichlet B, forms the
/// step matrix once, and factors the noise covariance once. Each step is
///
///   u^j = A (u^{j-1} + xi; 0).
///
/// Immutable after construction; paths may run concurrently.
class SpdeSolver {
public:
    SpdeSolver(SpdeProblem problem, NoiseModel noise, std::vector<double> probe_points = {});

    const SpdeProblem& problem() const { return problem_; }
    const NoiseModel& noise_model() const { return noise_; }
    const SystemPtr& system() const { return system_; }
    const StepOperator& step() const { return step_; }
    const NoiseSampler& sampler() const { return sampler_; }
    const std::vector<double>& probe_points() const { return probe_points_; }

    std::vector<double> times() const;

    PathResult run_path(RngStream& stream) const;
    PathResult run_path(std::uint64_t master_seed, std::uint64_t path_index) const;

    /// xi ~ N(0, V Psi_0 V) with V = diag(psi(u^{j-1})) and Psi_0 = dt R.
    PathResult run_path_multiplicative(const NoiseAmplitude& psi, RngStream& stream) const;

    /// Paths 0..n_paths-1 of `master_seed`, run on `workers` threads in fixed
    /// blocks and reduced in index order: output is independent of `workers`.
    EnsembleStats run_ensemble(std::size_t n_paths, std::uint64_t master_seed,
                               unsigned workers = 1) const;

private:
    template <class NoiseFn>
    PathResult run(RngStream& stream, NoiseFn&& make_noise) const;

    SpdeProblem problem_;
    NoiseModel noise_;
    std::vector<double> probe_points_;
    SystemPtr system_;
    StepOperator step_;
    NoiseSampler sampler_;
    std::vector<double> probe_rows_;
};

}  // namespace kcoll
