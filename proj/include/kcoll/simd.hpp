#pragma once

// Data-parallel inner loops used by quadrature, step-matrix application and
// noise synthesis. Each kernel has a scalar reference implementation and an
// AVX2+FMA variant; the variant is chosen once at runtime from CPUID.

#include <cstddef>
#include <span>
#include <string_view>

namespace kcoll::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// ISA used by the dispatching entry points below. Detected on first use;
/// `KCOLL_ISA=scalar` in the environment forces the reference path.
Isa active_isa();

/// True when the running CPU can execute the given variant.
bool isa_available(Isa isa);

/// Override the dispatch target (tests use this to compare variants).
/// Requesting an unavailable ISA leaves the current choice unchanged and
/// returns false.
bool set_active_isa(Isa isa);

/// sum_i a[i] * b[i]
double dot(std::span<const double> a, std::span<const double> b);

/// sum_i (a[i] * b[i]) * w[i]. The product a*b is formed first, so swapping
/// `a` and `b` gives a bitwise-identical result.
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);

/// y = M x for a row-major rows x cols matrix.
void gemv(std::span<const double> matrix, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);

/// y = L z for a row-major lower-triangular n x n matrix (upper part ignored).
void trmv_lower(std::span<const double> lower, std::size_t n,
                std::span<const double> z, std::span<double> y);

/// y[i] = s * x[i]
void scale(double s, std::span<const double> x, std::span<double> y);

/// y[i] = d[i] * x[i]
void hadamard(std::span<const double> d, std::span<const double> x,
              std::span<double> y);

/// y[i] += x[i]
void add_inplace(std::span<const double> x, std::span<double> y);

// Variant entry points, exposed for equivalence testing.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n);
void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x,
          double* y);
void trmv_lower(const double* l, std::size_t n, const double* z, double* y);
void scale(double s, const double* x, double* y, std::size_t n);
void hadamard(const double* d, const double* x, double* y, std::size_t n);
void add_inplace(const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n);
void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x,
          double* y);
void trmv_lower(const double* l, std::size_t n, const double* z, double* y);
void scale(double s, const double* x, double* y, std::size_t n);
void hadamard(const double* d, const double* x, double* y, std::size_t n);
void add_inplace(const double* x, double* y, std::size_t n);
}  // namespace avx2

}  // namespace kcoll::simd
