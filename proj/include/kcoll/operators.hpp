#pragma once

#include <functional>
#include <vector>

#include "kcoll/kernel.hpp"

namespace kcoll {

/// Coefficient c(x) of one derivative term. Constant coefficients skip the
/// function call.
class Coefficient {
public:
    Coefficient(double value) : constant_(value) {}  // NOLINT: implicit by intent
    Coefficient(std::function<double(double)> fn) : fn_(std::move(fn)) {}  // NOLINT

    double operator()(double x) const { return fn_ ? fn_(x) : constant_; }
    bool is_constant() const { return !fn_; }
    Coefficient scaled(double factor) const;

private:
    double constant_ = 0.0;
    std::function<double(double)> fn_;
};

struct OperatorTerm {
    int order;  // derivative order, 0..2
    Coefficient coefficient;
};

enum class Argument { first, second };

/// f(order, x) returning the order-th derivative of a function at x.
using DerivativeFn = std::function<double(int order, double x)>;

/// sum_a c_a(x) d^a/dx^a with orders in {0, 1, 2}.
class LinearOperator {
public:
    LinearOperator() = default;
    explicit LinearOperator(std::vector<OperatorTerm> terms);

    static LinearOperator identity();

    const std::vector<OperatorTerm>& terms() const { return terms_; }

    /// Highest derivative order carried by a term (0 for the empty operator).
    int order() const;

    /// (L f)(x) for a function given through its derivatives.
    double apply(const DerivativeFn& f, double x) const;

    /// L applied to the designated argument of `kernel`, evaluated at (x, y).
    double apply_to_kernel(const Kernel& kernel, Argument argument, double x,
                           double y) const;

    /// out[q] = (L_1 K)(x, z[q]).
    void apply_to_kernel_row(const Kernel& kernel, double x, std::span<const double> z,
                             std::span<double> out) const;

    friend LinearOperator operator+(const LinearOperator& a, const LinearOperator& b);
    friend LinearOperator operator*(double s, const LinearOperator& a);

private:
    std::vector<OperatorTerm> terms_;
};

/// Interior operator P.
class DifferentialOperator : public LinearOperator {
public:
    DifferentialOperator() = default;
    explicit DifferentialOperator(LinearOperator op) : LinearOperator(std::move(op)) {}
    explicit DifferentialOperator(std::vector<OperatorTerm> terms)
        : LinearOperator(std::move(terms)) {}

    static DifferentialOperator identity() {
        return DifferentialOperator(LinearOperator::identity());
    }
};

/// Boundary operator B, evaluated only at points of {0, 1}.
class BoundaryOperator : public LinearOperator {
public:
    BoundaryOperator() = default;
    explicit BoundaryOperator(LinearOperator op) : LinearOperator(std::move(op)) {}
    explicit BoundaryOperator(std::vector<OperatorTerm> terms)
        : LinearOperator(std::move(terms)) {}

    /// Trace u |-> u on {0, 1}.
    static BoundaryOperator dirichlet() { return BoundaryOperator(LinearOperator::identity()); }
};

/// Implicit-Euler step operator I - delta_t * diffusion * d^2/dx^2.
DifferentialOperator make_step_operator(double delta_t, double diffusion_coefficient = 1.0);

double apply_to_kernel(const LinearOperator& op, const Kernel& kernel, Argument argument,
                       double x, double y);

/// (L_1 R_2 K)(x, y): `left` on the first argument, `right` on the second.
double apply_to_kernel_both(const LinearOperator& left, const LinearOperator& right,
                            const Kernel& kernel, double x, double y);

}  // namespace kcoll
