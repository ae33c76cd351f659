#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string_view>

#include "kcoll/simd.hpp"

namespace kcoll::simd {
namespace {

Isa detect() {
    if (const char* forced = std::getenv("KCOLL_ISA");
        forced != nullptr && std::string_view(forced) == "scalar")
        return Isa::scalar;
    return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::avx2: return "avx2";
        case Isa::scalar: break;
    }
    return "scalar";
}

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa) {
    if (!isa_available(isa)) return false;
    current().store(isa, std::memory_order_relaxed);
    return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    return active_isa() == Isa::avx2 ? avx2::dot(a.data(), b.data(), a.size())
                                     : scalar::dot(a.data(), b.data(), a.size());
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
    assert(w.size() == a.size() && a.size() == b.size());
    return active_isa() == Isa::avx2
               ? avx2::weighted_dot(w.data(), a.data(), b.data(), w.size())
               : scalar::weighted_dot(w.data(), a.data(), b.data(), w.size());
}

void gemv(std::span<const double> matrix, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
    assert(matrix.size() >= rows * cols && x.size() >= cols && y.size() >= rows);
    if (active_isa() == Isa::avx2)
        avx2::gemv(matrix.data(), rows, cols, x.data(), y.data());
    else
        scalar::gemv(matrix.data(), rows, cols, x.data(), y.data());
}

void trmv_lower(std::span<const double> lower, std::size_t n,
                std::span<const double> z, std::span<double> y) {
    assert(lower.size() >= n * n && z.size() >= n && y.size() >= n);
    if (active_isa() == Isa::avx2)
        avx2::trmv_lower(lower.data(), n, z.data(), y.data());
    else
        scalar::trmv_lower(lower.data(), n, z.data(), y.data());
}

void scale(double s, std::span<const double> x, std::span<double> y) {
    assert(y.size() >= x.size());
    if (active_isa() == Isa::avx2)
        avx2::scale(s, x.data(), y.data(), x.size());
    else
        scalar::scale(s, x.data(), y.data(), x.size());
}

void hadamard(std::span<const double> d, std::span<const double> x,
              std::span<double> y) {
    assert(d.size() == x.size() && y.size() >= x.size());
    if (active_isa() == Isa::avx2)
        avx2::hadamard(d.data(), x.data(), y.data(), x.size());
    else
        scalar::hadamard(d.data(), x.data(), y.data(), x.size());
}

void add_inplace(std::span<const double> x, std::span<double> y) {
    assert(y.size() >= x.size());
    if (active_isa() == Isa::avx2)
        avx2::add_inplace(x.data(), y.data(), x.size());
    else
        scalar::add_inplace(x.data(), y.data(), x.size());
}

}  // namespace kcoll::simd
