#include "udg/lattice.hpp"

#include <cmath>
#include <numbers>

namespace udg {

const BasisConstants& basis() {
    static const BasisConstants k = [] {
        BasisConstants b;
        b.omega1 = std::polar(1.0, std::numbers::pi / 3.0);
        b.omega3 = {5.0 / 6.0, std::sqrt(11.0) / 6.0};
        b.omega13 = b.omega1 * b.omega3;
        return b;
    }();
    return k;
}

std::vector<LatticePoint> enumerate_units() {
    // |v| <= 4 for any unit (smallest eigenvalue of the quadratic form is 1/12).
    std::vector<LatticePoint> units;
    for (int a = -4; a <= 4; ++a)
        for (int b = -4; b <= 4; ++b)
            for (int c = -4; c <= 4; ++c)
                for (int d = -4; d <= 4; ++d) {
                    const LatticePoint p{a, b, c, d};
                    if (is_unit(p)) units.push_back(p);
                }
    return units;  // loop order is already lexicographic
}

std::span<const LatticePoint> unit_vectors() {
    static const std::vector<LatticePoint> units = enumerate_units();
    return units;
}

std::complex<double> embed(const LatticePoint& p) {
    const auto& k = basis();
    return double(p[0]) + double(p[1]) * k.omega1 + double(p[2]) * k.omega3 + double(p[3]) * k.omega13;
}

}  // namespace udg
