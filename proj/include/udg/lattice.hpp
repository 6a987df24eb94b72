#pragma once

#include <array>
#include <compare>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace udg {

// A point of the Moser lattice, stored as integer coefficients over the
// basis {1, w1, w3, w1*w3} with w1 = exp(i*pi/3) and w3 = (5 + i*sqrt(11))/6.
struct LatticePoint {
    std::array<std::int32_t, 4> c{};

    constexpr LatticePoint() = default;
    constexpr LatticePoint(std::int32_t a, std::int32_t b, std::int32_t cc, std::int32_t d) : c{a, b, cc, d} {}

    constexpr std::int32_t operator[](std::size_t i) const { return c[i]; }
    constexpr std::int32_t& operator[](std::size_t i) { return c[i]; }

    friend constexpr LatticePoint operator+(LatticePoint p, const LatticePoint& q) {
        for (std::size_t i = 0; i < 4; ++i) p.c[i] += q.c[i];
        return p;
    }
    friend constexpr LatticePoint operator-(LatticePoint p, const LatticePoint& q) {
        for (std::size_t i = 0; i < 4; ++i) p.c[i] -= q.c[i];
        return p;
    }
    friend constexpr LatticePoint operator-(LatticePoint p) {
        for (auto& x : p.c) x = -x;
        return p;
    }
    friend constexpr bool operator==(const LatticePoint&, const LatticePoint&) = default;
    friend constexpr auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

/// Complex embedding constants. Only used for rendering and as a floating-point oracle.
struct BasisConstants {
    std::complex<double> omega1;
    std::complex<double> omega3;
    std::complex<double> omega13;
};

const BasisConstants& basis();

/// 6 * |p|^2 restricted to the rational part, i.e. 6*p(a,b,c,d). Exact in 64 bits
/// for any coefficients that fit in 32 bits with room to spare.
constexpr std::int64_t quad_form_x6(const LatticePoint& p) {
    const std::int64_t a = p[0], b = p[1], c = p[2], d = p[3];
    return 6 * a * a + 6 * a * b + 10 * a * c + 5 * a * d + 6 * b * b + 5 * b * c + 10 * b * d + 6 * c * c +
           6 * c * d + 6 * d * d;
}

/// |p| == 1 exactly. The irrational part (bc - ad) * sqrt(33)/6 must vanish.
constexpr bool is_unit(const LatticePoint& p) {
    return quad_form_x6(p) == 6 && std::int64_t{p[0]} * p[3] == std::int64_t{p[1]} * p[2];
}

constexpr bool is_unit_distance(const LatticePoint& p, const LatticePoint& q) { return is_unit(p - q); }

/// The 18 unit vectors of the lattice, lexicographically sorted. Computed once.
std::span<const LatticePoint> unit_vectors();

/// Brute-force enumeration over [-4,4]^4; unit_vectors() caches this.
std::vector<LatticePoint> enumerate_units();

std::complex<double> embed(const LatticePoint& p);

}  // namespace udg
