#include "kcoll/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "kcoll/error.hpp"

namespace kcoll {

// ---------------------------------------------------------------------------
// Point sets

std::vector<double> CollocationSet::points() const {
    std::vector<double> all = interior;
    all.insert(all.end(), boundary.begin(), boundary.end());
    return all;
}

double fill_distance(std::span<const double> points, std::size_t candidates) {
    if (points.empty()) throw InvalidArgument("fill distance of an empty point set");
    if (candidates < 2) throw InvalidArgument("fill distance needs at least two candidates");
    std::vector<double> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    double worst = 0.0;
    for (std::size_t c = 0; c < candidates; ++c) {
        const double x = static_cast<double>(c) / static_cast<double>(candidates - 1);
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
        double nearest = std::numeric_limits<double>::infinity();
        if (it != sorted.end()) nearest = *it - x;
        if (it != sorted.begin()) nearest = std::min(nearest, x - *std::prev(it));
        worst = std::max(worst, nearest);
    }
    return worst;
}

CollocationSet make_collocation_set(std::vector<double> interior,
                                    std::vector<double> boundary) {
    if (interior.empty()) throw InvalidArgument("collocation set needs interior points");
    for (double x : interior)
        if (!(x > 0.0 && x < 1.0))
            throw InvalidArgument("interior collocation point " + std::to_string(x) +
                                  " is not inside (0, 1)");
    for (double x : boundary)
        if (x != 0.0 && x != 1.0)
            throw InvalidArgument("boundary collocation point " + std::to_string(x) +
                                  " is not in {0, 1}");
    CollocationSet set{std::move(interior), std::move(boundary), 0.0};
    auto all = set.points();
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw InvalidArgument("collocation points must be pairwise distinct");
    set.fill_distance = fill_distance(all);
    return set;
}

CollocationSet uniform_collocation(int n_interior) {
    if (n_interior < 1) throw InvalidArgument("n_interior must be at least 1");
    std::vector<double> interior(static_cast<std::size_t>(n_interior));
    for (int j = 1; j <= n_interior; ++j)
        interior[static_cast<std::size_t>(j - 1)] =
            static_cast<double>(j) / static_cast<double>(n_interior + 1);
    return make_collocation_set(std::move(interior), {0.0, 1.0});
}

// ---------------------------------------------------------------------------
// Symmetric solver

SymmetricSolver::SymmetricSolver(const Eigen::MatrixXd& matrix) : size_(matrix.rows()) {
    if (matrix.rows() != matrix.cols()) throw InvalidArgument("solver needs a square matrix");
    llt_.compute(matrix);
    if (llt_.info() == Eigen::Success) {
        rank_ = size_;
        return;
    }
    pseudo_ = true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix);
    if (eig.info() != Eigen::Success)
        throw NumericalError("symmetric eigendecomposition failed");
    const Eigen::VectorXd& values = eig.eigenvalues();
    if (size_ > 0 && !(values.maxCoeff() > 0.0))
        throw NumericalError("collocation matrix has no positive eigenvalue");
    const double cutoff = kPseudoInverseCutoff * values.maxCoeff();
    eigenvectors_ = eig.eigenvectors();
    inverse_eigenvalues_ = Eigen::VectorXd::Zero(size_);
    for (Eigen::Index i = 0; i < size_; ++i) {
        if (values[i] > cutoff) {
            inverse_eigenvalues_[i] = 1.0 / values[i];
            ++rank_;
        }
    }
}

Eigen::VectorXd SymmetricSolver::solve(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != size_) throw InvalidArgument("right-hand side has the wrong length");
    if (!pseudo_) return llt_.solve(rhs);
    return eigenvectors_ *
           (inverse_eigenvalues_.asDiagonal() * (eigenvectors_.transpose() * rhs));
}

Eigen::MatrixXd SymmetricSolver::solve(const Eigen::MatrixXd& rhs) const {
    if (rhs.rows() != size_) throw InvalidArgument("right-hand side has the wrong height");
    if (!pseudo_) return llt_.solve(rhs);
    return eigenvectors_ *
           (inverse_eigenvalues_.asDiagonal() * (eigenvectors_.transpose() * rhs));
}

// ---------------------------------------------------------------------------
// Assembly

SystemPtr assemble(const CollocationSet& points, const DifferentialOperator& interior_op,
                   const BoundaryOperator& boundary_op,
                   std::shared_ptr<const IntegralKernelEvaluator> evaluator) {
    if (!evaluator) throw InvalidArgument("assembly needs a kernel evaluator");
    if (points.n_interior() == 0) throw InvalidArgument("assembly needs interior points");

    std::shared_ptr<CollocationSystem> system(new CollocationSystem());
    system->points_ = points;
    system->interior_op_ = interior_op;
    system->boundary_op_ = boundary_op;
    system->evaluator_ = evaluator;

    const std::size_t n = points.n_interior();
    const std::size_t total = points.size();
    const std::vector<double> all = points.points();
    KstarTable table(*evaluator, all);
    const int p_slot = table.add_operator(interior_op);
    const int b_slot = table.add_operator(boundary_op);
    const int id_slot = table.add_operator(LinearOperator::identity());
    const auto slot_of = [&](std::size_t i) { return i < n ? p_slot : b_slot; };

    const auto check = [&](double v, std::size_t i, std::size_t k, const char* what) {
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "non-finite " << what << " entry at (" << i << ", " << k
                << ") for points (" << all[i] << ", "
                << all[k] << ")";
            throw NumericalError(msg.str());
        }
        return v;
    };

    auto& m = system->matrix_;
    m.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
    for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t k = i; k < total; ++k) {
            const double v = check(table.entry(slot_of(i), i, slot_of(k), k), i, k, "K*_PB");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
            m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = v;
        }
    }

    auto& basis = system->interior_basis_;
    basis.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(total));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < total; ++k)
            basis(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                check(table.entry(id_slot, j, slot_of(k), k), j, k, "basis");

    system->solver_ = SymmetricSolver(m);
    return system;
}

Eigen::VectorXd CollocationSystem::basis(double x) const {
    return basis(LinearOperator::identity(), x);
}

Eigen::VectorXd CollocationSystem::basis(const LinearOperator& op, double x) const {
    const std::size_t n = points_.n_interior();
    const auto inner = evaluator_->op_kstar_many(op, x, interior_op_, points_.interior);
    const auto outer = evaluator_->op_kstar_many(op, x, boundary_op_, points_.boundary);
    Eigen::VectorXd k(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < n; ++i) k[static_cast<Eigen::Index>(i)] = inner[i];
    for (std::size_t i = 0; i < outer.size(); ++i)
        k[static_cast<Eigen::Index>(n + i)] = outer[i];
    return k;
}

// ---------------------------------------------------------------------------
// Estimators

Estimator::Estimator(SystemPtr system, Eigen::VectorXd coefficients)
    : system_(std::move(system)), coefficients_(std::move(coefficients)) {
    if (!system_) throw InvalidArgument("estimator needs a collocation system");
    if (coefficients_.size() != static_cast<Eigen::Index>(system_->size()))
        throw InvalidArgument("estimator coefficient count does not match the system");
}

double Estimator::operator()(double x) const { return system_->basis(x).dot(coefficients_); }

double Estimator::apply(const LinearOperator& op, double x) const {
    return system_->basis(op, x).dot(coefficients_);
}

Eigen::VectorXd collocation_data(const CollocationSet& points, const ScalarFn& f,
                                 const ScalarFn& g) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
    Eigen::Index i = 0;
    for (double x : points.interior) y[i++] = f(x);
    for (double x : points.boundary) y[i++] = g(x);
    return y;
}

Estimator solve_with_data(const SystemPtr& system, const Eigen::VectorXd& data) {
    if (!system) throw NumericalError("collocation system is not factorized");
    return Estimator(system, system->solve(data));
}

Estimator solve_elliptic(const SystemPtr& system, const ScalarFn& f, const ScalarFn& g) {
    if (!system) throw NumericalError("collocation system is not factorized");
    return solve_with_data(system, collocation_data(system->points(), f, g));
}

double power_function(const CollocationSystem& system, double x) {
    const Eigen::VectorXd k = system.basis(x);
    const double prior = system.evaluator().kstar(x, x);
    const double var = prior - k.dot(system.solve(k));
    if (var >= 0.0) return std::sqrt(var);
    if (var >= -1e-10 * prior) return 0.0;
    std::ostringstream msg;
    msg << "conditional variance " << var << " at x=" << x
        << " is negative beyond round-off (prior variance " << prior << ")";
    throw NumericalError(msg.str());
}

double error_probability(const CollocationSystem& system, double x, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    const double sigma = power_function(system, x);
    if (sigma == 0.0) return 0.0;
    return std::erfc(epsilon / (std::numbers::sqrt2 * sigma));
}

KernelInterpolant::KernelInterpolant(std::shared_ptr<const Kernel> kernel,
                                     std::vector<double> points,
                                     Eigen::VectorXd coefficients)
    : kernel_(std::move(kernel)),
      points_(std::move(points)),
      coefficients_(std::move(coefficients)) {}

double KernelInterpolant::operator()(double x) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < points_.size(); ++k)
        acc += coefficients_[static_cast<Eigen::Index>(k)] * kernel_->eval(x, points_[k]);
    return acc;
}

namespace {

void check_data(std::span<const double> points, std::span<const double> values) {
    if (points.empty()) throw InvalidArgument("no data points");
    if (points.size() != values.size())
        throw InvalidArgument("points and values differ in length");
    std::vector<double> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidArgument("data points must be distinct");
}

Eigen::VectorXd to_vector(std::span<const double> values) {
    return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                             static_cast<Eigen::Index>(values.size()));
}

}  // namespace

KernelInterpolant min_norm_interpolant(std::span<const double> points,
                                       std::span<const double> values,
                                       std::shared_ptr<const Kernel> kernel) {
    check_data(points, values);
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            gram(i, k) = kernel->eval(points[static_cast<std::size_t>(i)],
                                      points[static_cast<std::size_t>(k)]);
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-15))
        throw NumericalError("kernel Gram matrix is singular to working precision");
    Eigen::VectorXd c = llt.solve(to_vector(values));
    return KernelInterpolant(std::move(kernel), {points.begin(), points.end()}, std::move(c));
}

IntegralKernelFit::IntegralKernelFit(std::shared_ptr<const IntegralKernelEvaluator> evaluator,
                                     std::vector<double> points,
                                     Eigen::VectorXd coefficients)
    : evaluator_(std::move(evaluator)),
      points_(std::move(points)),
      coefficients_(std::move(coefficients)) {}

double IntegralKernelFit::operator()(double x) const {
    static const LinearOperator id = LinearOperator::identity();
    const auto k = evaluator_->op_kstar_many(id, x, id, points_);
    double acc = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i)
        acc += coefficients_[static_cast<Eigen::Index>(i)] * k[i];
    return acc;
}

IntegralKernelFit stochastic_data_fit(std::span<const double> points,
                                      std::span<const double> values,
                                      std::shared_ptr<const IntegralKernelEvaluator> evaluator) {
    check_data(points, values);
    std::vector<double> pts(points.begin(), points.end());
    KstarTable table(*evaluator, pts);
    const int id = table.add_operator(LinearOperator::identity());
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = i; k < n; ++k)
            gram(i, k) = gram(k, i) = table.entry(id, static_cast<std::size_t>(i), id,
                                                  static_cast<std::size_t>(k));
    const SymmetricSolver solver(gram);
    return IntegralKernelFit(std::move(evaluator), std::move(pts),
                             solver.solve(to_vector(values)));
}

}  // namespace kcoll
