#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kcoll {

/// Symmetric kernel on the unit interval with partial derivatives.
///
/// `eval(x, y, dx, dy)` returns d^dx/dx^dx d^dy/dy^dy K(x, y). Implementations
/// throw UnsupportedError for orders above `max_order()`.
class Kernel {
public:
    virtual ~Kernel() = default;

    virtual double eval(double x, double y, int dx = 0, int dy = 0) const = 0;

    /// Highest derivative order supported in each argument separately.
    virtual int max_order() const = 0;

    /// out[q] = d^dx_1 d^dz_2 K(x, z[q]).
    virtual void eval_row(double x, std::span<const double> z, int dx, int dz,
                          std::span<double> out) const;
};

/// Sobolev-spline (Matérn) kernel K(x, y) = g_{m,theta}(x - y) in one
/// dimension, where g_{m,theta} is the full-space Green function of
/// (theta^2 - d^2/dx^2)^m.
///
/// For d = 1 the Bessel order m - 1/2 is a half-integer and the kernel reduces
/// to exp(-t) p(t) with t = theta |x - y| and p a polynomial of degree m - 1;
/// for m = 3 this is exp(-t)(t^2 + 3t + 3) / (16 theta^5). Derivatives use the
/// same closed form. The kernel is C^{2m-2} at the diagonal, so the combined
/// order dx + dy is limited to 2m - 2 and each argument to 2.
class MaternKernel final : public Kernel {
public:
    /// Throws UnsupportedError unless `dimension == 1` and `m >= 2`.
    MaternKernel(int m, double theta, int dimension = 1);

    double eval(double x, double y, int dx = 0, int dy = 0) const override;
    int max_order() const override { return max_order_; }
    void eval_row(double x, std::span<const double> z, int dx, int dz,
                  std::span<double> out) const override;

    int m() const { return m_; }
    double theta() const { return theta_; }
    int dimension() const { return 1; }

    /// d^k/ds^k of the radial profile g(s), s = x - y, k <= 2m - 2.
    double profile_derivative(double s, int k) const;

private:
    void check_orders(int dx, int dy) const;

    int m_;
    double theta_;
    int max_order_;
    double scale_;  // 2^{-m} / ((m-1)! theta^{2m-1})
    // polys_[k] holds the coefficients (ascending) of q_k where
    // d^k/dt^k [exp(-t) p(t)] = exp(-t) q_k(t).
    std::vector<std::vector<double>> polys_;
};

/// Truncated Mercer expansion sum_k lambda_k e_k(x) e_k(y).
class SpectralKernel {
public:
    using Eigenfunction = std::function<double(std::size_t k, double x)>;

    /// `eigenvalues[k-1]` pairs with `eigenfunction(k, .)`, k = 1..truncation.
    SpectralKernel(std::vector<double> eigenvalues, Eigenfunction eigenfunction);

    /// lambda_k = (k pi)^{-2 power}, e_k(x) = sqrt(2) sin(k pi x): the
    /// Brownian-bridge family (power 1) and its iterated version (power 2).
    static SpectralKernel sine_family(int power, std::size_t truncation = 200);

    std::size_t truncation() const { return eigenvalues_.size(); }
    double eigenvalue(std::size_t k) const { return eigenvalues_.at(k - 1); }
    double eigenfunction(std::size_t k, double x) const { return eigenfunction_(k, x); }
    std::span<const double> eigenvalues() const { return eigenvalues_; }

    /// sum_{k <= n_modes} lambda_k e_k(x) e_k(y); throws InvalidArgument when
    /// n_modes exceeds the truncation.
    double partial_sum(double x, double y, std::size_t n_modes) const;

private:
    std::vector<double> eigenvalues_;
    Eigenfunction eigenfunction_;
};

double spectral_partial_sum(const SpectralKernel& kernel, double x, double y,
                            std::size_t n_modes);

enum class CovarianceVariant { r1, r2, spectral };

/// Spatial covariance of the driving noise. R1(x, y) = min(x, y) - xy is the
/// Brownian bridge; R2 is its integral square, a piecewise cubic.
/// Only zeroth derivatives are available when used as a base kernel.
class CovarianceKernel final : public Kernel {
public:
    static CovarianceKernel r1();
    static CovarianceKernel r2();
    static CovarianceKernel spectral(SpectralKernel kernel);

    CovarianceVariant variant() const { return variant_; }

    double eval(double x, double y, int dx = 0, int dy = 0) const override;
    int max_order() const override { return 0; }

    double operator()(double x, double y) const { return eval(x, y); }

private:
    explicit CovarianceKernel(CovarianceVariant variant) : variant_(variant) {}

    CovarianceVariant variant_;
    std::vector<SpectralKernel> spectral_;  // holds one element for the spectral variant
};

double covariance_eval(const CovarianceKernel& cov, double x, double y);

/// R1 closed form min(x, y) - xy.
double brownian_bridge(double x, double y);

/// R2 closed form, the integral of R1(x, z) R1(y, z) over z in (0, 1).
double iterated_brownian_bridge(double x, double y);

double matern_eval(const MaternKernel& kernel, double x, double y, int dx_order,
                   int dy_order);

}  // namespace kcoll
