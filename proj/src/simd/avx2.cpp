// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include "kcoll/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace kcoll::simd::avx2 {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                               _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        __m256d p1 =
            _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(w + i), acc0);
        acc1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(w + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(p, _mm256_loadu_pd(w + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += (a[i] * b[i]) * w[i];
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
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(sv, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = s * x[i];
}

void hadamard(const double* d, const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i,
                         _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = d[i] * x[i];
}

void add_inplace(const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i,
                         _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] += x[i];
}

}  // namespace kcoll::simd::avx2

#else

// Non-x86 builds: the AVX2 entry points alias the reference kernels and
// isa_available(Isa::avx2) reports false, so they are never dispatched to.
namespace kcoll::simd::avx2 {
double dot(const double* a, const double* b, std::size_t n) {
    return scalar::dot(a, b, n);
}
double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n) {
    return scalar::weighted_dot(w, a, b, n);
}
void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x,
          double* y) {
    scalar::gemv(m, rows, cols, x, y);
}
void trmv_lower(const double* l, std::size_t n, const double* z, double* y) {
    scalar::trmv_lower(l, n, z, y);
}
void scale(double s, const double* x, double* y, std::size_t n) {
    scalar::scale(s, x, y, n);
}
void hadamard(const double* d, const double* x, double* y, std::size_t n) {
    scalar::hadamard(d, x, y, n);
}
void add_inplace(const double* x, double* y, std::size_t n) {
    scalar::add_inplace(x, y, n);
}
}  // namespace kcoll::simd::avx2

#endif
