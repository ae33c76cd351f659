#include "kcoll/integral_kernel.hpp"

#include <array>
#include <string>

#include "kcoll/error.hpp"
#include "kcoll/simd.hpp"

namespace kcoll {

IntegralKernelEvaluator::IntegralKernelEvaluator(std::shared_ptr<const Kernel> base,
                                                 QuadratureSettings settings)
    : base_(std::move(base)), settings_(settings) {
    if (!base_) throw InvalidArgument("integral kernel needs a base kernel");
    if (settings_.panels < 1 || settings_.nodes_per_panel < 1)
        throw InvalidArgument("quadrature panels and nodes must be positive");
}

void IntegralKernelEvaluator::check_operator(const LinearOperator& op) const {
    if (op.order() > base_->max_order())
        throw UnsupportedError("operator of order " + std::to_string(op.order()) +
                               " exceeds the base kernel's derivative order " +
                               std::to_string(base_->max_order()));
}

QuadratureRule IntegralKernelEvaluator::rule(std::span<const double> breakpoints) const {
    return composite_rule(settings_.panels, settings_.nodes_per_panel, breakpoints);
}

std::vector<double> IntegralKernelEvaluator::row(const LinearOperator& op, double x,
                                                 const QuadratureRule& rule) const {
    std::vector<double> out(rule.size());
    op.apply_to_kernel_row(*base_, x, rule.nodes, out);
    return out;
}

double IntegralKernelEvaluator::kstar(double x, double y) const {
    static const LinearOperator id = LinearOperator::identity();
    return op_kstar(id, id, x, y);
}

double IntegralKernelEvaluator::op_kstar(const LinearOperator& left,
                                         const LinearOperator& right, double x,
                                         double y) const {
    check_operator(left);
    check_operator(right);
    const std::array<double, 2> breaks{x, y};
    const QuadratureRule r = rule(breaks);
    const auto a = row(left, x, r);
    const auto b = row(right, y, r);
    return simd::weighted_dot(r.weights, a, b);
}

std::vector<double> IntegralKernelEvaluator::op_kstar_many(
    const LinearOperator& left, double x, const LinearOperator& right,
    std::span<const double> ys) const {
    check_operator(left);
    check_operator(right);
    std::vector<double> breaks(ys.begin(), ys.end());
    breaks.push_back(x);
    const QuadratureRule r = rule(breaks);
    const auto a = row(left, x, r);
    std::vector<double> out(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const auto b = row(right, ys[i], r);
        out[i] = simd::weighted_dot(r.weights, a, b);
    }
    return out;
}

KstarTable::KstarTable(const IntegralKernelEvaluator& evaluator, std::vector<double> points)
    : evaluator_(&evaluator), points_(std::move(points)), rule_(evaluator.rule(points_)) {}

int KstarTable::add_operator(LinearOperator op) {
    evaluator_->check_operator(op);
    operators_.push_back(std::move(op));
    return static_cast<int>(operators_.size()) - 1;
}

std::span<const double> KstarTable::row(int slot, std::size_t index) {
    const auto key = std::make_pair(slot, index);
    auto it = rows_.find(key);
    if (it == rows_.end()) {
        if (slot < 0 || slot >= static_cast<int>(operators_.size()))
            throw InvalidArgument("unknown operator slot " + std::to_string(slot));
        it = rows_
                 .emplace(key, evaluator_->row(operators_[static_cast<std::size_t>(slot)],
                                               points_.at(index), rule_))
                 .first;
    }
    return it->second;
}

double KstarTable::entry(int left_slot, std::size_t i, int right_slot, std::size_t k) {
    const auto a = row(left_slot, i);
    const auto b = row(right_slot, k);
    return simd::weighted_dot(rule_.weights, a, b);
}

}  // namespace kcoll
