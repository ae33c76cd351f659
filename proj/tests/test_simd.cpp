#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kcoll/simd.hpp"

using namespace kcoll;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] * b[i]);
    return acc;
}

}  // namespace

TEST_CASE("avx2 kernels agree with the scalar reference") {
    if (!simd::isa_available(simd::Isa::avx2)) {
        MESSAGE("AVX2 not available on this CPU; equivalence check skipped");
        return;
    }
    std::mt19937_64 rng(7);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 100u, 1453u}) {
        const auto a = random_vector(rng, n);
        const auto b = random_vector(rng, n);
        auto w = random_vector(rng, n);
        for (double& x : w) x = std::abs(x);

        const double tol = 1e-14 * (l1(a, b) * 2.0 + 1.0);
        CHECK(std::abs(simd::avx2::dot(a.data(), b.data(), n) -
                       simd::scalar::dot(a.data(), b.data(), n)) <= tol);
        CHECK(std::abs(simd::avx2::weighted_dot(w.data(), a.data(), b.data(), n) -
                       simd::scalar::weighted_dot(w.data(), a.data(), b.data(), n)) <= tol);

        // Elementwise kernels have no reassociation and must match bitwise.
        std::vector<double> ys(n), yv(n);
        simd::scalar::scale(1.7, a.data(), ys.data(), n);
        simd::avx2::scale(1.7, a.data(), yv.data(), n);
        CHECK(ys == yv);
        simd::scalar::hadamard(w.data(), a.data(), ys.data(), n);
        simd::avx2::hadamard(w.data(), a.data(), yv.data(), n);
        CHECK(ys == yv);
        ys = b;
        yv = b;
        simd::scalar::add_inplace(a.data(), ys.data(), n);
        simd::avx2::add_inplace(a.data(), yv.data(), n);
        CHECK(ys == yv);
    }
}

TEST_CASE("matrix kernels agree with the scalar reference") {
    if (!simd::isa_available(simd::Isa::avx2)) return;
    std::mt19937_64 rng(11);
    for (std::size_t rows : {1u, 5u, 30u}) {
        for (std::size_t cols : {1u, 6u, 32u, 61u}) {
            const auto m = random_vector(rng, rows * cols);
            const auto x = random_vector(rng, cols);
            std::vector<double> ys(rows), yv(rows);
            simd::scalar::gemv(m.data(), rows, cols, x.data(), ys.data());
            simd::avx2::gemv(m.data(), rows, cols, x.data(), yv.data());
            for (std::size_t r = 0; r < rows; ++r) CHECK(yv[r] == doctest::Approx(ys[r]).epsilon(1e-13));
        }
        const auto l = random_vector(rng, rows * rows);
        const auto z = random_vector(rng, rows);
        std::vector<double> ys(rows), yv(rows);
        simd::scalar::trmv_lower(l.data(), rows, z.data(), ys.data());
        simd::avx2::trmv_lower(l.data(), rows, z.data(), yv.data());
        for (std::size_t r = 0; r < rows; ++r) CHECK(yv[r] == doctest::Approx(ys[r]).epsilon(1e-13));
    }
}

TEST_CASE("weighted_dot is symmetric in its two data arguments") {
    std::mt19937_64 rng(3);
    const auto a = random_vector(rng, 257);
    const auto b = random_vector(rng, 257);
    const auto w = random_vector(rng, 257);
    for (auto isa : {simd::Isa::scalar, simd::Isa::avx2}) {
        if (!simd::isa_available(isa)) continue;
        const auto before = simd::active_isa();
        simd::set_active_isa(isa);
        CHECK(simd::weighted_dot(w, a, b) == simd::weighted_dot(w, b, a));
        simd::set_active_isa(before);
    }
}

TEST_CASE("dispatch honours overrides") {
    const auto before = simd::active_isa();
    CHECK(simd::set_active_isa(simd::Isa::scalar));
    CHECK(simd::active_isa() == simd::Isa::scalar);
    CHECK(simd::isa_name(simd::Isa::scalar) == "scalar");
    simd::set_active_isa(before);
}
