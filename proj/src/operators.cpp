#include "kcoll/operators.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "kcoll/error.hpp"

namespace kcoll {

Coefficient Coefficient::scaled(double factor) const {
    if (!fn_) return Coefficient(constant_ * factor);
    return Coefficient([fn = fn_, factor](double x) { return factor * fn(x); });
}

LinearOperator::LinearOperator(std::vector<OperatorTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_)
        if (t.order < 0 || t.order > 2)
            throw UnsupportedError("operator term of derivative order " +
                                   std::to_string(t.order) + " (supported: 0..2)");
}

LinearOperator LinearOperator::identity() { return LinearOperator({{0, Coefficient(1.0)}}); }

int LinearOperator::order() const {
    int order = 0;
    for (const auto& t : terms_) order = std::max(order, t.order);
    return order;
}

double LinearOperator::apply(const DerivativeFn& f, double x) const {
    double acc = 0.0;
    for (const auto& t : terms_) acc += t.coefficient(x) * f(t.order, x);
    return acc;
}

double LinearOperator::apply_to_kernel(const Kernel& kernel, Argument argument, double x,
                                       double y) const {
    double acc = 0.0;
    for (const auto& t : terms_) {
        if (argument == Argument::first)
            acc += t.coefficient(x) * kernel.eval(x, y, t.order, 0);
        else
            acc += t.coefficient(y) * kernel.eval(x, y, 0, t.order);
    }
    return acc;
}

void LinearOperator::apply_to_kernel_row(const Kernel& kernel, double x,
                                         std::span<const double> z,
                                         std::span<double> out) const {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(z.size()), 0.0);
    std::vector<double> buffer(z.size());
    for (const auto& t : terms_) {
        kernel.eval_row(x, z, t.order, 0, buffer);
        const double c = t.coefficient(x);
        for (std::size_t q = 0; q < z.size(); ++q) out[q] += c * buffer[q];
    }
}

LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
    std::vector<OperatorTerm> terms = a.terms_;
    terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
    return LinearOperator(std::move(terms));
}

LinearOperator operator*(double s, const LinearOperator& a) {
    std::vector<OperatorTerm> terms;
    terms.reserve(a.terms_.size());
    for (const auto& t : a.terms_) terms.push_back({t.order, t.coefficient.scaled(s)});
    return LinearOperator(std::move(terms));
}

DifferentialOperator make_step_operator(double delta_t, double diffusion_coefficient) {
    if (!(delta_t > 0.0)) throw InvalidArgument("time step must be positive");
    return DifferentialOperator(
        {{0, Coefficient(1.0)}, {2, Coefficient(-delta_t * diffusion_coefficient)}});
}

double apply_to_kernel(const LinearOperator& op, const Kernel& kernel, Argument argument,
                       double x, double y) {
    return op.apply_to_kernel(kernel, argument, x, y);
}

double apply_to_kernel_both(const LinearOperator& left, const LinearOperator& right,
                            const Kernel& kernel, double x, double y) {
    double acc = 0.0;
    for (const auto& l : left.terms()) {
        const double cl = l.coefficient(x);
        for (const auto& r : right.terms())
            acc += cl * r.coefficient(y) * kernel.eval(x, y, l.order, r.order);
    }
    return acc;
}

}  // namespace kcoll
