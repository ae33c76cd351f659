#include "kcoll/simd.hpp"

namespace kcoll::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (a[i] * b[i]) * w[i];
    return acc;
}

void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x,
          double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(m + r * cols, x, cols);
}

void trmv_lower(const double* l, std::size_t n, const double* z, double* y) {
    for (std::size_t r = 0; r < n; ++r) y[r] = dot(l + r * n, z, r + 1);
}

void scale(double s, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = s * x[i];
}

void hadamard(const double* d, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = d[i] * x[i];
}

void add_inplace(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

}  // namespace kcoll::simd::scalar
