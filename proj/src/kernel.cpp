#include "kcoll/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kcoll/error.hpp"

namespace kcoll {

void Kernel::eval_row(double x, std::span<const double> z, int dx, int dz,
                      std::span<double> out) const {
    for (std::size_t q = 0; q < z.size(); ++q) out[q] = eval(x, z[q], dx, dz);
}

// ---------------------------------------------------------------------------
// Matérn

namespace {

double horner(const std::vector<double>& coeffs, double t) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
    return acc;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

MaternKernel::MaternKernel(int m, double theta, int dimension)
    : m_(m), theta_(theta) {
    if (dimension != 1 || m < 2)
        throw UnsupportedError("kernel family not implemented: Matern m=" +
                               std::to_string(m) + ", d=" + std::to_string(dimension) +
                               " (closed form available for d=1, m>=2)");
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw InvalidArgument("Matern shape parameter theta must be positive");

    max_order_ = std::min(2, m - 1);
    scale_ = std::pow(2.0, -m) / (factorial(m - 1) * std::pow(theta, 2 * m - 1));

    // t^{p+1/2} K_{p+1/2}(t) = sqrt(pi/2) e^{-t} sum_j (p+j)!/(j!(p-j)!) 2^{-j} t^{p-j}
    const int p = m - 1;
    std::vector<double> base(p + 1, 0.0);
    for (int j = 0; j <= p; ++j)
        base[p - j] = factorial(p + j) / (factorial(j) * factorial(p - j)) *
                      std::ldexp(1.0, -j);

    const int top = 2 * m - 2;
    polys_.reserve(top + 1);
    polys_.push_back(std::move(base));
    for (int k = 0; k < top; ++k) {
        const auto& q = polys_.back();
        std::vector<double> next(q.size(), 0.0);
        for (std::size_t i = 0; i < q.size(); ++i) {
            next[i] -= q[i];
            if (i + 1 < q.size()) next[i] += static_cast<double>(i + 1) * q[i + 1];
        }
        polys_.push_back(std::move(next));
    }
}

void MaternKernel::check_orders(int dx, int dy) const {
    if (dx < 0 || dy < 0 || dx > max_order_ || dy > max_order_)
        throw UnsupportedError("Matern m=" + std::to_string(m_) +
                               " supports derivative orders up to " +
                               std::to_string(max_order_) + " per argument, got (" +
                               std::to_string(dx) + ", " + std::to_string(dy) + ")");
}

double MaternKernel::profile_derivative(double s, int k) const {
    if (k < 0 || k >= static_cast<int>(polys_.size()))
        throw UnsupportedError("Matern profile derivative of order " + std::to_string(k) +
                               " is not defined at the diagonal");
    const double t = theta_ * std::abs(s);
    double value = scale_ * std::pow(theta_, k) * std::exp(-t) * horner(polys_[k], t);
    // Odd derivatives of the radial profile vanish at t = 0, so sign(0) is moot.
    if ((k & 1) != 0 && s < 0.0) value = -value;
    return value;
}

double MaternKernel::eval(double x, double y, int dx, int dy) const {
    check_orders(dx, dy);
    const double v = profile_derivative(x - y, dx + dy);
    return (dy & 1) != 0 ? -v : v;
}

void MaternKernel::eval_row(double x, std::span<const double> z, int dx, int dz,
                            std::span<double> out) const {
    check_orders(dx, dz);
    const int k = dx + dz;
    const auto& poly = polys_[k];
    const double pre = scale_ * std::pow(theta_, k) * ((dz & 1) != 0 ? -1.0 : 1.0);
    const bool odd = (k & 1) != 0;
    for (std::size_t q = 0; q < z.size(); ++q) {
        const double s = x - z[q];
        const double t = theta_ * std::abs(s);
        double v = pre * std::exp(-t) * horner(poly, t);
        out[q] = (odd && s < 0.0) ? -v : v;
    }
}

double matern_eval(const MaternKernel& kernel, double x, double y, int dx_order,
                   int dy_order) {
    return kernel.eval(x, y, dx_order, dy_order);
}

// ---------------------------------------------------------------------------
// Spectral

SpectralKernel::SpectralKernel(std::vector<double> eigenvalues,
                               Eigenfunction eigenfunction)
    : eigenvalues_(std::move(eigenvalues)), eigenfunction_(std::move(eigenfunction)) {
    if (!eigenfunction_) throw InvalidArgument("spectral kernel needs an eigenfunction family");
    for (double v : eigenvalues_)
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidArgument("spectral kernel eigenvalues must be positive and finite");
}

SpectralKernel SpectralKernel::sine_family(int power, std::size_t truncation) {
    if (power < 1) throw InvalidArgument("sine family power must be >= 1");
    std::vector<double> values(truncation);
    for (std::size_t k = 1; k <= truncation; ++k)
        values[k - 1] = std::pow(static_cast<double>(k) * std::numbers::pi, -2.0 * power);
    return SpectralKernel(std::move(values), [](std::size_t k, double x) {
        return std::numbers::sqrt2 * std::sin(static_cast<double>(k) * std::numbers::pi * x);
    });
}

double SpectralKernel::partial_sum(double x, double y, std::size_t n_modes) const {
    if (n_modes > truncation())
        throw InvalidArgument("requested " + std::to_string(n_modes) +
                              " modes but the expansion is truncated at " +
                              std::to_string(truncation()));
    double acc = 0.0;
    for (std::size_t k = 1; k <= n_modes; ++k)
        acc += eigenvalues_[k - 1] * eigenfunction_(k, x) * eigenfunction_(k, y);
    return acc;
}

double spectral_partial_sum(const SpectralKernel& kernel, double x, double y,
                            std::size_t n_modes) {
    return kernel.partial_sum(x, y, n_modes);
}

// ---------------------------------------------------------------------------
// Noise covariances

double brownian_bridge(double x, double y) { return std::min(x, y) - x * y; }

double iterated_brownian_bridge(double x, double y) {
    // Written for a <= b; the closed form is symmetric under the swap.
    const double a = std::min(x, y);
    const double b = std::max(x, y);
    return -a * a * a / 6.0 + a * a * a * b / 6.0 + a * b * b * b / 6.0 -
           a * b * b / 2.0 + a * b / 3.0;
}

CovarianceKernel CovarianceKernel::r1() { return CovarianceKernel(CovarianceVariant::r1); }
CovarianceKernel CovarianceKernel::r2() { return CovarianceKernel(CovarianceVariant::r2); }

CovarianceKernel CovarianceKernel::spectral(SpectralKernel kernel) {
    CovarianceKernel cov(CovarianceVariant::spectral);
    cov.spectral_.push_back(std::move(kernel));
    return cov;
}

double CovarianceKernel::eval(double x, double y, int dx, int dy) const {
    if (dx != 0 || dy != 0)
        throw UnsupportedError("noise covariance kernels provide values only");
    switch (variant_) {
        case CovarianceVariant::r1: return brownian_bridge(x, y);
        case CovarianceVariant::r2: return iterated_brownian_bridge(x, y);
        case CovarianceVariant::spectral: {
            const auto& s = spectral_.front();
            // Sum in a fixed argument order so the value is exactly symmetric.
            return x <= y ? s.partial_sum(x, y, s.truncation())
                          : s.partial_sum(y, x, s.truncation());
        }
    }
    return 0.0;
}

double covariance_eval(const CovarianceKernel& cov, double x, double y) {
    return cov.eval(x, y);
}

}  // namespace kcoll
