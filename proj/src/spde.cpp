#include "kcoll/spde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <thread>

#include "kcoll/error.hpp"
#include "kcoll/simd.hpp"

namespace kcoll {

// ---------------------------------------------------------------------------
// Noise

NoiseSampler::NoiseSampler(const NoiseModel& model, std::span<const double> points)
    : n_(points.size()), sigma_(model.sigma) {
    if (!(model.sigma >= 0.0) || !std::isfinite(model.sigma))
        throw InvalidArgument("noise amplitude sigma must be finite and non-negative");
    if (!(model.delta_t > 0.0)) throw InvalidArgument("noise time step must be positive");
    if (n_ == 0) throw InvalidArgument("noise needs at least one point");

    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd psi(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            psi(i, k) = model.delta_t * model.covariance(points[static_cast<std::size_t>(i)],
                                                         points[static_cast<std::size_t>(k)]);
    covariance_.resize(n_ * n_);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            covariance_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(k)] =
                psi(i, k);

    const double max_diag = psi.diagonal().cwiseAbs().maxCoeff();
    double jitter = kInitialJitter * (max_diag > 0.0 ? max_diag : 1.0);
    for (int attempt = 0; attempt < kJitterAttempts; ++attempt, jitter *= 10.0) {
        Eigen::MatrixXd shifted = psi;
        shifted.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() != Eigen::Success) continue;
        const Eigen::MatrixXd lower = llt.matrixL();
        factor_.assign(n_ * n_, 0.0);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index k = 0; k <= i; ++k)
                factor_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(k)] =
                    lower(i, k);
        jitter_ = jitter;
        return;
    }
    throw NumericalError("noise covariance is not positive definite after jitter escalation");
}

void NoiseSampler::sample_shape(RngStream& stream, std::span<double> out) const {
    std::vector<double> z(n_);
    stream.fill_normal(z);
    simd::trmv_lower(factor_, n_, z, out);
}

void NoiseSampler::sample(RngStream& stream, std::span<double> out) const {
    sample_shape(stream, out);
    simd::scale(sigma_, out.first(n_), out);
}

std::vector<double> sample_noise(const NoiseModel& model, const CollocationSet& points,
                                 RngStream& stream) {
    const NoiseSampler sampler(model, points.interior);
    std::vector<double> xi(sampler.size());
    sampler.sample(stream, xi);
    return xi;
}

Estimator solve_elliptic_spde(const SystemPtr& system, const ScalarFn& f, const ScalarFn& g,
                              std::span<const double> noise) {
    if (!system) throw NumericalError("collocation system is not factorized");
    const auto& pts = system->points();
    if (noise.size() != pts.n_interior())
        throw InvalidArgument("noise vector length must equal the interior point count");
    Eigen::VectorXd y = collocation_data(pts, f, g);
    for (std::size_t j = 0; j < noise.size(); ++j) y[static_cast<Eigen::Index>(j)] += noise[j];
    return solve_with_data(system, y);
}

// ---------------------------------------------------------------------------
// Step matrix

StepOperator::StepOperator(SystemPtr system)
    : system_(std::move(system)),
      rows_(system_ ? system_->points().n_interior() : 0),
      cols_(system_ ? system_->size() : 0) {
    if (!system_) throw NumericalError("collocation system is not factorized");
    // A = B~ K^{-1}  <=>  A^T = K^{-1} B~^T (K symmetric).
    const Eigen::MatrixXd at = system_->solver().solve(
        Eigen::MatrixXd(system_->interior_basis().transpose()));
    matrix_.resize(rows_ * cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            matrix_[r * cols_ + c] =
                at(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r));
}

Eigen::MatrixXd StepOperator::as_matrix() const {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                matrix_[r * cols_ + c];
    return a;
}

void StepOperator::apply(std::span<const double> v, std::span<double> out) const {
    if (v.size() != cols_ || out.size() < rows_)
        throw InvalidArgument("step operator applied to a vector of the wrong length");
    simd::gemv(matrix_, rows_, cols_, v, out);
    applications_.fetch_add(1, std::memory_order_relaxed);
}

StepOperator precompute_step(const SystemPtr& system) { return StepOperator(system); }

std::vector<double> evaluation_rows(const CollocationSystem& system,
                                    std::span<const double> xs) {
    const std::size_t cols = system.size();
    std::vector<double> rows(xs.size() * cols);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Eigen::VectorXd w = system.solve(system.basis(xs[i]));
        for (std::size_t c = 0; c < cols; ++c)
            rows[i * cols + c] = w[static_cast<Eigen::Index>(c)];
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Problem

void SpdeProblem::validate() const {
    if (steps < 1) throw InvalidArgument("number of time steps must be at least 1");
    if (!(horizon > 0.0)) throw InvalidArgument("time horizon must be positive");
    if (!initial_condition) throw InvalidArgument("initial condition is missing");
    if (points.n_interior() == 0) throw InvalidArgument("collocation set has no interior points");
    for (double b : {0.0, 1.0})
        if (std::abs(initial_condition(b)) > 1e-12)
            throw InvalidArgument("initial condition must vanish on the boundary");
}

// ---------------------------------------------------------------------------
// Ensemble statistics

EnsembleAccumulator::EnsembleAccumulator(std::size_t steps, std::size_t points,
                                         std::size_t probes, std::size_t expected_paths)
    : mean_(steps, points),
      m2_(steps, points),
      probe_mean_(steps, probes),
      probe_m2_(steps, probes),
      points_(points),
      probes_(probes) {
    final_values_.reserve(expected_paths * points);
    final_probes_.reserve(expected_paths * probes);
}

namespace {

void welford(std::span<double> mean, std::span<double> m2, std::span<const double> x,
             double count) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double delta = x[i] - mean[i];
        mean[i] += delta / count;
        m2[i] += delta * (x[i] - mean[i]);
    }
}

}  // namespace

void EnsembleAccumulator::add(const PathResult& path) {
    if (path.values.rows != mean_.rows || path.values.cols != points_ ||
        path.probes.cols != probes_)
        throw InvalidArgument("path shape does not match the accumulator");
    ++count_;
    const auto c = static_cast<double>(count_);
    welford(mean_.data, m2_.data, path.values.data, c);
    if (probes_ > 0) welford(probe_mean_.data, probe_m2_.data, path.probes.data, c);
    if (mean_.rows > 0) {
        const auto last = path.values.row(mean_.rows - 1);
        final_values_.insert(final_values_.end(), last.begin(), last.end());
        if (probes_ > 0) {
            const auto plast = path.probes.row(mean_.rows - 1);
            final_probes_.insert(final_probes_.end(), plast.begin(), plast.end());
        }
    }
}

EnsembleStats EnsembleAccumulator::finish(std::vector<double> times, std::vector<double> points,
                                          std::vector<double> probe_points) const {
    EnsembleStats stats;
    stats.times = std::move(times);
    stats.points = std::move(points);
    stats.probe_points = std::move(probe_points);
    stats.paths = count_;
    stats.mean = mean_;
    stats.probe_mean = probe_mean_;
    stats.variance = m2_;
    stats.probe_variance = probe_m2_;
    const double s = count_ > 0 ? static_cast<double>(count_) : 1.0;
    for (double& v : stats.variance.data) v /= s;
    for (double& v : stats.probe_variance.data) v /= s;
    stats.final_values = Trajectory(count_, points_);
    stats.final_values.data = final_values_;
    stats.final_probes = Trajectory(count_, probes_);
    stats.final_probes.data = final_probes_;
    return stats;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

SystemPtr build_heat_system(const SpdeProblem& problem) {
    problem.validate();
    auto kernel = std::make_shared<MaternKernel>(problem.kernel_m, problem.kernel_theta);
    auto evaluator = std::make_shared<IntegralKernelEvaluator>(kernel, problem.quadrature);
    return assemble(problem.points, make_step_operator(problem.delta_t(), problem.diffusion),
                    BoundaryOperator::dirichlet(), evaluator);
}

NoiseModel with_step(NoiseModel model, double dt) {
    model.delta_t = dt;
    return model;
}

}  // namespace

SpdeSolver::SpdeSolver(SpdeProblem problem, NoiseModel noise, std::vector<double> probe_points)
    : problem_(std::move(problem)),
      noise_(with_step(std::move(noise), problem_.delta_t())),
      probe_points_(std::move(probe_points)),
      system_(build_heat_system(problem_)),
      step_(system_),
      sampler_(noise_, problem_.points.interior),
      probe_rows_(evaluation_rows(*system_, probe_points_)) {}

std::vector<double> SpdeSolver::times() const {
    std::vector<double> t(static_cast<std::size_t>(problem_.steps));
    for (int j = 1; j <= problem_.steps; ++j)
        t[static_cast<std::size_t>(j - 1)] = problem_.horizon * j / problem_.steps;
    return t;
}

template <class NoiseFn>
PathResult SpdeSolver::run(RngStream& stream, NoiseFn&& make_noise) const {
    const std::size_t n = step_.rows();
    const std::size_t cols = step_.cols();
    const auto steps = static_cast<std::size_t>(problem_.steps);
    const std::size_t n_probes = probe_points_.size();

    PathResult result;
    result.master_seed = stream.master_seed();
    result.path_index = stream.path_index();
    result.values = Trajectory(steps, n);
    result.probes = Trajectory(steps, n_probes);
    result.initial.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        result.initial[k] = problem_.initial_condition(problem_.points.interior[k]);

    std::vector<double> state = result.initial;
    std::vector<double> xi(n);
    std::vector<double> stacked(cols, 0.0);  // boundary rows stay exactly zero
    for (std::size_t j = 0; j < steps; ++j) {
        make_noise(stream, std::span<const double>(state), std::span<double>(xi));
        std::copy(state.begin(), state.end(), stacked.begin());
        simd::add_inplace(xi, std::span<double>(stacked).first(n));
        auto out = result.values.row(j);
        step_.apply(stacked, out);
        if (n_probes > 0) simd::gemv(probe_rows_, n_probes, cols, stacked, result.probes.row(j));
        for (std::size_t k = 0; k < n; ++k) {
            if (!std::isfinite(out[k])) {
                std::ostringstream msg;
                msg << "non-finite state at step " << (j + 1) << " (x=" << problem_.points.interior[k]
                    << ")";
                throw NumericalError(msg.str());
            }
        }
        std::copy(out.begin(), out.end(), state.begin());
    }
    return result;
}

PathResult SpdeSolver::run_path(RngStream& stream) const {
    return run(stream, [this](RngStream& s, std::span<const double>, std::span<double> xi) {
        sampler_.sample(s, xi);
    });
}

PathResult SpdeSolver::run_path(std::uint64_t master_seed, std::uint64_t path_index) const {
    RngStream stream(master_seed, path_index);
    return run_path(stream);
}

PathResult SpdeSolver::run_path_multiplicative(const NoiseAmplitude& psi,
                                               RngStream& stream) const {
    if (!psi) throw InvalidArgument("multiplicative noise needs an amplitude function");
    std::vector<double> amplitude(step_.rows());
    return run(stream, [&](RngStream& s, std::span<const double> state, std::span<double> xi) {
        for (std::size_t k = 0; k < state.size(); ++k) amplitude[k] = psi(state[k]);
        sampler_.sample_shape(s, xi);
        simd::hadamard(amplitude, xi, xi);
    });
}

EnsembleStats SpdeSolver::run_ensemble(std::size_t n_paths, std::uint64_t master_seed,
                                       unsigned workers) const {
    if (n_paths < 2) throw InvalidArgument("an ensemble needs at least two paths");
    workers = std::max(1u, workers);
    constexpr std::size_t kBlock = 64;

    EnsembleAccumulator acc(static_cast<std::size_t>(problem_.steps), step_.rows(),
                            probe_points_.size(), n_paths);
    std::vector<PathResult> block(kBlock);
    for (std::size_t start = 0; start < n_paths; start += kBlock) {
        const std::size_t count = std::min(kBlock, n_paths - start);
        const auto work = [&](unsigned w) {
            for (std::size_t i = w; i < count; i += workers)
                block[i] = run_path(master_seed, start + i);
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::jthread> pool;
            std::vector<std::exception_ptr> errors(workers);
            pool.reserve(workers);
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    try {
                        work(w);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            pool.clear();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }
        for (std::size_t i = 0; i < count; ++i) acc.add(block[i]);
    }
    auto stats = acc.finish(times(), problem_.points.interior, probe_points_);
    stats.master_seed = master_seed;
    return stats;
}

}  // namespace kcoll
