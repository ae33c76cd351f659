#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>

#include "kcoll/error.hpp"
#include "kcoll/integral_kernel.hpp"
#include "kcoll/kernel.hpp"
#include "kcoll/quadrature.hpp"

using namespace kcoll;

namespace {

std::shared_ptr<const Kernel> matern() { return std::make_shared<MaternKernel>(3, 26.5); }

}  // namespace

TEST_CASE("Gauss-Legendre rules") {
    for (int n : {1, 2, 5, 10, 16}) {
        const auto gl = gauss_legendre(n);
        double sum = 0.0;
        for (double w : gl.weights) sum += w;
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
        // Exact for x^(2n-2) and x^(2n-1) (odd: zero).
        double even = 0.0, odd = 0.0;
        for (int i = 0; i < n; ++i) {
            even += gl.weights[i] * std::pow(gl.nodes[i], 2 * n - 2);
            odd += gl.weights[i] * std::pow(gl.nodes[i], 2 * n - 1);
        }
        CHECK(even == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
        CHECK(std::abs(odd) <= 1e-14);
    }
    CHECK_THROWS_AS(gauss_legendre(0), InvalidArgument);
}

TEST_CASE("composite rule integrates polynomials per panel") {
    const std::vector<double> breaks{0.3, 0.3, 0.71, 1.0, -0.2};
    const auto rule = composite_rule(8, 10, breaks);
    double sum = 0.0, poly = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        sum += rule.weights[q];
        poly += rule.weights[q] * std::pow(rule.nodes[q], 19);
        CHECK(rule.nodes[q] > 0.0);
        CHECK(rule.nodes[q] < 1.0);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-14);
    CHECK(poly == doctest::Approx(1.0 / 20.0).epsilon(1e-13));
    // Two interior breakpoints that do not coincide with panel edges add two panels.
    CHECK(rule.size() == 10u * 10u);
}

TEST_CASE("integral kernel of the Brownian bridge is R2") {
    const IntegralKernelEvaluator ev(std::make_shared<CovarianceKernel>(CovarianceKernel::r1()));
    double worst = 0.0;
    for (int i = 1; i <= 10; ++i)
        for (int j = 1; j <= 10; ++j) {
            const double x = i / 11.0, y = j / 11.0;
            worst = std::max(worst, std::abs(ev.kstar(x, y) - iterated_brownian_bridge(x, y)));
        }
    CHECK(worst <= 1e-8);
}

TEST_CASE("kstar symmetry and positivity") {
    const IntegralKernelEvaluator ev(matern());
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const double x = u(rng), y = u(rng);
        CHECK(ev.kstar(x, y) == ev.kstar(y, x));
        CHECK(ev.kstar(x, x) >= 0.0);
        CHECK(ev.op_kstar(LinearOperator::identity(), LinearOperator::identity(), x, y) ==
              ev.kstar(x, y));
    }
}

TEST_CASE("operator kstar symmetry") {
    const IntegralKernelEvaluator ev(matern());
    const auto p = make_step_operator(0.01);
    const auto id = LinearOperator::identity();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double x = u(rng), y = u(rng);
        const double a = ev.op_kstar(p, id, x, y), b = ev.op_kstar(id, p, y, x);
        CHECK(a == doctest::Approx(b).epsilon(1e-13));
    }
}

TEST_CASE("operator kstar matches finite differences of kstar") {
    const IntegralKernelEvaluator ev(std::make_shared<MaternKernel>(3, 3.0));
    const double dt = 0.05, h = 1e-3;
    const auto p = make_step_operator(dt);
    const auto id = LinearOperator::identity();
    for (auto [x, y] : {std::pair{0.3, 0.6}, {0.5, 0.5}, {0.1, 0.9}, {0.42, 0.4}}) {
        const double k0 = ev.kstar(x, y), kp = ev.kstar(x + h, y), km = ev.kstar(x - h, y);
        const double fd = k0 - dt * (kp - 2 * k0 + km) / (h * h);
        // Relative to the diagonal scale (K* values here are O(1e-5)).
        CHECK(std::abs(ev.op_kstar(p, id, x, y) - fd) <= 1e-4 * ev.kstar(x, x));
    }
}

TEST_CASE("operator kstar Gram matrix is positive semi-definite") {
    const IntegralKernelEvaluator ev(matern());
    const auto p = make_step_operator(1.0 / 200.0);
    std::vector<double> pts;
    for (int i = 1; i <= 10; ++i) pts.push_back(i / 11.0);
    Eigen::MatrixXd g(10, 10);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) g(i, j) = ev.op_kstar(p, p, pts[i], pts[j]);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * g.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());
}

TEST_CASE("quadrature refinement and panel alignment") {
    const auto base = matern();
    const IntegralKernelEvaluator coarse(base, {64, 10});
    const IntegralKernelEvaluator fine(base, {128, 10});
    const auto p = make_step_operator(0.01);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(u(rng));
    for (double x : pts)
        for (double y : pts) {
            const double a = coarse.kstar(x, y), b = fine.kstar(x, y);
            CHECK(std::abs(a - b) <= 1e-10 * coarse.kstar(x, x));
            const double pa = coarse.op_kstar(p, p, x, y), pb = fine.op_kstar(p, p, x, y);
            CHECK(std::abs(pa - pb) <= 1e-10 * coarse.op_kstar(p, p, x, x));
        }

    // The memo table splits at every point, the direct evaluator only at x and y.
    KstarTable table(coarse, pts);
    const int id = table.add_operator(LinearOperator::identity());
    const int ps = table.add_operator(p);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double scale = coarse.op_kstar(p, p, pts[i], pts[i]);
            CHECK(std::abs(table.entry(ps, i, ps, k) - coarse.op_kstar(p, p, pts[i], pts[k])) <=
                  1e-12 * scale);
            CHECK(std::abs(table.entry(id, i, id, k) - coarse.kstar(pts[i], pts[k])) <=
                  1e-12 * coarse.kstar(pts[i], pts[i]));
        }
}

TEST_CASE("memo table caches rows by operator and point") {
    const IntegralKernelEvaluator ev(matern());
    KstarTable table(ev, {0.2, 0.5, 0.8});
    const int id = table.add_operator(LinearOperator::identity());
    CHECK(table.cached_rows() == 0);
    table.entry(id, 0, id, 1);
    CHECK(table.cached_rows() == 2);
    table.entry(id, 1, id, 0);
    CHECK(table.cached_rows() == 2);
    CHECK(table.entry(id, 0, id, 1) == table.entry(id, 1, id, 0));
}

TEST_CASE("many-point evaluation agrees with single evaluations") {
    const IntegralKernelEvaluator ev(matern());
    const auto p = make_step_operator(0.02);
    const std::vector<double> ys{0.0, 0.1, 0.45, 0.9, 1.0};
    const auto many = ev.op_kstar_many(p, 0.45, LinearOperator::identity(), ys);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double one = ev.op_kstar(p, LinearOperator::identity(), 0.45, ys[i]);
        CHECK(std::abs(many[i] - one) <= 1e-12 * std::abs(ev.op_kstar(p, p, 0.45, 0.45)));
    }
}

TEST_CASE("unsupported operators are rejected") {
    const IntegralKernelEvaluator ev(std::make_shared<CovarianceKernel>(CovarianceKernel::r1()));
    CHECK_THROWS_AS(ev.op_kstar(make_step_operator(0.1), LinearOperator::identity(), 0.2, 0.3),
                    UnsupportedError);
    CHECK_THROWS_AS(IntegralKernelEvaluator(matern(), {0, 10}), InvalidArgument);
}
