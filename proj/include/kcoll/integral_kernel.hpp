#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "kcoll/kernel.hpp"
#include "kcoll/operators.hpp"
#include "kcoll/quadrature.hpp"

namespace kcoll {

struct QuadratureSettings {
    int panels = 64;
    int nodes_per_panel = 10;
};

/// Integral-type kernel K*(x, y) = int_0^1 K(x, z) K(y, z) dz and its
/// operator-applied forms
///
///   (L_1 R_2 K*)(x, y) = int_0^1 (L K)(x, z) (R K)(y, z) dz,
///
/// i.e. operators are moved under the integral and act on the base kernel.
/// The integrand is piecewise analytic with breaks at z = x and z = y, so the
/// composite rule is always split there.
///
/// Immutable and safe for concurrent use.
class IntegralKernelEvaluator {
public:
    explicit IntegralKernelEvaluator(std::shared_ptr<const Kernel> base,
                                     QuadratureSettings settings = {});

    const Kernel& base() const { return *base_; }
    std::shared_ptr<const Kernel> base_ptr() const { return base_; }
    const QuadratureSettings& settings() const { return settings_; }

    double kstar(double x, double y) const;

    double op_kstar(const LinearOperator& left, const LinearOperator& right, double x,
                    double y) const;

    /// (L_1 R_2 K*)(x, y_i) for every y_i, sharing one rule split at x and all y_i.
    std::vector<double> op_kstar_many(const LinearOperator& left, double x,
                                      const LinearOperator& right,
                                      std::span<const double> ys) const;

    /// Composite rule from the settings, refined at `breakpoints`.
    QuadratureRule rule(std::span<const double> breakpoints) const;

    /// (L K)(x, z_q) over the nodes of `rule`.
    std::vector<double> row(const LinearOperator& op, double x,
                            const QuadratureRule& rule) const;

    /// Throws UnsupportedError if the base kernel cannot differentiate `op.order()` times.
    void check_operator(const LinearOperator& op) const;

private:
    std::shared_ptr<const Kernel> base_;
    QuadratureSettings settings_;
};

/// Memoised operator rows on a fixed point set for matrix assembly.
///
/// One rule is split at every point, so each entry (L_i, R_k) is a weighted
/// dot product of two cached rows. Rows are keyed by (operator slot, point
/// index). Not thread-safe: populate before sharing across threads.
class KstarTable {
public:
    KstarTable(const IntegralKernelEvaluator& evaluator, std::vector<double> points);

    /// Register an operator; the returned slot id is used in lookups.
    int add_operator(LinearOperator op);

    double entry(int left_slot, std::size_t i, int right_slot, std::size_t k);

    std::span<const double> row(int slot, std::size_t index);

    const QuadratureRule& rule() const { return rule_; }
    std::size_t cached_rows() const { return rows_.size(); }

private:
    const IntegralKernelEvaluator* evaluator_;
    std::vector<double> points_;
    QuadratureRule rule_;
    std::vector<LinearOperator> operators_;
    std::map<std::pair<int, std::size_t>, std::vector<double>> rows_;
};

}  // namespace kcoll
