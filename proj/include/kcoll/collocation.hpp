#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kcoll/integral_kernel.hpp"
#include "kcoll/kernel.hpp"
#include "kcoll/operators.hpp"

namespace kcoll {

using ScalarFn = std::function<double(double)>;

/// Interior points X_D in (0, 1) and boundary points X_dD in {0, 1}.
struct CollocationSet {
    std::vector<double> interior;
    std::vector<double> boundary;
    double fill_distance = 0.0;

    std::size_t n_interior() const { return interior.size(); }
    std::size_t n_boundary() const { return boundary.size(); }
    std::size_t size() const { return interior.size() + boundary.size(); }

    /// Interior points followed by boundary points.
    std::vector<double> points() const;
};

inline constexpr std::size_t kFillDistanceCandidates = 10000;

/// sup over `candidates` equispaced points of [0, 1] of the distance to the
/// nearest point of `points`.
double fill_distance(std::span<const double> points,
                     std::size_t candidates = kFillDistanceCandidates);

/// Validates the sets and computes the fill distance.
CollocationSet make_collocation_set(std::vector<double> interior,
                                    std::vector<double> boundary);

/// x_j = j / (n_interior + 1), boundary {0, 1}.
CollocationSet uniform_collocation(int n_interior);

/// Symmetric positive semi-definite solve: Cholesky when it succeeds,
/// otherwise the spectral pseudo-inverse with eigenvalues below
/// `kPseudoInverseCutoff * lambda_max` discarded.
class SymmetricSolver {
public:
    static constexpr double kPseudoInverseCutoff = 1e-12;

    SymmetricSolver() = default;
    explicit SymmetricSolver(const Eigen::MatrixXd& matrix);

    bool uses_pseudo_inverse() const { return pseudo_; }
    Eigen::Index size() const { return size_; }
    /// Number of eigenvalues retained (full size for the Cholesky path).
    Eigen::Index rank() const { return rank_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

private:
    Eigen::Index size_ = 0;
    Eigen::Index rank_ = 0;
    bool pseudo_ = false;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::MatrixXd eigenvectors_;
    Eigen::VectorXd inverse_eigenvalues_;
};

/// Collocation matrix
///
///   K*_PB = [ P1 P2 K*(x_j, x_k)     P1 B2 K*(x_j, x_{N+k})     ]
///           [ B1 P2 K*(x_{N+j}, x_k)  B1 B2 K*(x_{N+j}, x_{N+k}) ]
///
/// together with its factorisation and the basis functions
/// k_PB(x) = (P2 K*(x, x_k), B2 K*(x, x_{N+k})). Immutable once assembled.
class CollocationSystem {
public:
    const CollocationSet& points() const { return points_; }
    const DifferentialOperator& interior_operator() const { return interior_op_; }
    const BoundaryOperator& boundary_operator() const { return boundary_op_; }
    const IntegralKernelEvaluator& evaluator() const { return *evaluator_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const SymmetricSolver& solver() const { return solver_; }

    std::size_t size() const { return points_.size(); }

    /// Rows (P2 K*(x_j, x_k) ... B2 K*(x_j, x_{N+k})) at the interior points,
    /// i.e. k_PB(x_j)^T for j = 1..N. Shape N x (N+M).
    const Eigen::MatrixXd& interior_basis() const { return interior_basis_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return solver_.solve(rhs); }

    /// k_PB(x).
    Eigen::VectorXd basis(double x) const;

    /// (L_1 k_PB)(x): `op` applied to the first argument of every basis function.
    Eigen::VectorXd basis(const LinearOperator& op, double x) const;

private:
    friend std::shared_ptr<const CollocationSystem> assemble(
        const CollocationSet&, const DifferentialOperator&, const BoundaryOperator&,
        std::shared_ptr<const IntegralKernelEvaluator>);

    CollocationSystem() = default;

    CollocationSet points_;
    DifferentialOperator interior_op_;
    BoundaryOperator boundary_op_;
    std::shared_ptr<const IntegralKernelEvaluator> evaluator_;
    Eigen::MatrixXd matrix_;
    Eigen::MatrixXd interior_basis_;
    SymmetricSolver solver_;
};

using SystemPtr = std::shared_ptr<const CollocationSystem>;

/// Throws NumericalError naming the pair of any non-finite entry.
SystemPtr assemble(const CollocationSet& points, const DifferentialOperator& interior_op,
                   const BoundaryOperator& boundary_op,
                   std::shared_ptr<const IntegralKernelEvaluator> evaluator);

/// u(x) = k_PB(x)^T c.
class Estimator {
public:
    Estimator(SystemPtr system, Eigen::VectorXd coefficients);

    double operator()(double x) const;
    /// (L u)(x).
    double apply(const LinearOperator& op, double x) const;

    const Eigen::VectorXd& coefficients() const { return coefficients_; }
    const CollocationSystem& system() const { return *system_; }

private:
    SystemPtr system_;
    Eigen::VectorXd coefficients_;
};

/// c = K*_PB^{-1} y for a right-hand side stacked as (interior; boundary).
Estimator solve_with_data(const SystemPtr& system, const Eigen::VectorXd& data);

/// P u = f in (0, 1), B u = g on {0, 1}.
Estimator solve_elliptic(const SystemPtr& system, const ScalarFn& f, const ScalarFn& g);

/// (f(x_1..x_N), g(x_{N+1}..x_{N+M})).
Eigen::VectorXd collocation_data(const CollocationSet& points, const ScalarFn& f,
                                 const ScalarFn& g);

/// Conditional standard deviation
/// sigma(x)^2 = K*(x, x) - k_PB(x)^T K*_PB^{-1} k_PB(x).
/// Round-off negatives down to -1e-10 K*(x, x) are clamped to zero; anything
/// more negative throws NumericalError.
double power_function(const CollocationSystem& system, double x);

/// erfc(epsilon / (sqrt(2) sigma(x))), or 0 when sigma(x) = 0.
double error_probability(const CollocationSystem& system, double x, double epsilon);

/// Minimum-norm interpolant u(x) = sum c_k K(x, x_k) with K c = y.
class KernelInterpolant {
public:
    KernelInterpolant(std::shared_ptr<const Kernel> kernel, std::vector<double> points,
                      Eigen::VectorXd coefficients);
    double operator()(double x) const;
    const Eigen::VectorXd& coefficients() const { return coefficients_; }

private:
    std::shared_ptr<const Kernel> kernel_;
    std::vector<double> points_;
    Eigen::VectorXd coefficients_;
};

/// Throws NumericalError when the Gram matrix is singular.
KernelInterpolant min_norm_interpolant(std::span<const double> points,
                                       std::span<const double> values,
                                       std::shared_ptr<const Kernel> kernel);

/// Zero-mean conditional mean mu(x) = k*(x)^T K*^{-1} y built from the
/// integral-type kernel; falls back to the pseudo-inverse when singular.
class IntegralKernelFit {
public:
    IntegralKernelFit(std::shared_ptr<const IntegralKernelEvaluator> evaluator,
                      std::vector<double> points, Eigen::VectorXd coefficients);
    double operator()(double x) const;
    const Eigen::VectorXd& coefficients() const { return coefficients_; }

private:
    std::shared_ptr<const IntegralKernelEvaluator> evaluator_;
    std::vector<double> points_;
    Eigen::VectorXd coefficients_;
};

IntegralKernelFit stochastic_data_fit(std::span<const double> points,
                                      std::span<const double> values,
                                      std::shared_ptr<const IntegralKernelEvaluator> evaluator);

}  // namespace kcoll
