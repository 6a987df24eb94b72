#pragma once

// Shared helpers for the test binaries: independent floating-point oracles and
// random graph generators.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "udg/canonical.hpp"
#include "udg/lattice.hpp"

namespace udg::test {

// Embedding rebuilt from the defining formulas, independent of embed().
inline std::complex<double> float_embed(const LatticePoint& p) {
    const double pi = std::acos(-1.0);
    const std::complex<double> w1 = std::polar(1.0, pi / 3.0);
    const std::complex<double> w3 = std::polar(1.0, std::acos(1.0 - 1.0 / 6.0));
    return double(p[0]) + double(p[1]) * w1 + double(p[2]) * w3 + double(p[3]) * w1 * w3;
}

inline bool float_unit_distance(const LatticePoint& p, const LatticePoint& q) {
    return std::abs(std::abs(float_embed(p) - float_embed(q)) - 1.0) < 1e-8;
}

inline int float_edge_count(std::span<const LatticePoint> g) {
    int m = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j) m += float_unit_distance(g[i], g[j]) ? 1 : 0;
    return m;
}

// The 18 rows of the published unit-vector matrix.
inline std::set<LatticePoint> published_units() {
    return {{-2, 1, 2, -1}, {-1, -1, 1, 1}, {-1, 0, 0, 0}, {-1, 1, 0, 0}, {-1, 2, 1, -2}, {0, -1, 0, 0},
            {0, 0, -1, 0},  {0, 0, -1, 1},  {0, 0, 0, -1}, {0, 0, 0, 1},  {0, 0, 1, -1},  {0, 0, 1, 0},
            {0, 1, 0, 0},   {1, -2, -1, 2}, {1, -1, 0, 0}, {1, 0, 0, 0},  {1, 1, -1, -1}, {2, -1, -2, 1}};
}

// Densest known edge counts for 1..30 vertices.
inline const std::vector<int>& published_best_edges() {
    static const std::vector<int> e{0,  1,  3,  5,  7,  9,  12, 14, 18, 20, 23, 27, 30, 33, 37,
                                    41, 43, 46, 50, 54, 57, 60, 64, 68, 72, 76, 81, 85, 89, 93};
    return e;
}

// Isomorphism-class counts of the densest known graphs for 1..30 vertices.
inline const std::vector<std::size_t>& published_iso_counts() {
    static const std::vector<std::size_t> i{1, 1, 1, 1, 1, 4, 1,  3,  1, 1, 2, 1, 1, 2, 1,
                                            1, 6, 16, 3, 1, 5, 35, 10, 7, 3, 2, 1, 2, 1, 2};
    return i;
}

inline LatticePoint random_point(std::mt19937_64& rng, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return {d(rng), d(rng), d(rng), d(rng)};
}

// Connected graph grown by attaching unit steps to existing vertices; it also
// adds every unit pair implicitly since adjacency is geometric.
inline GraphMatrix random_connected_graph(std::mt19937_64& rng, int n) {
    static const std::vector<LatticePoint> units = [] {
        const auto s = published_units();
        return std::vector<LatticePoint>(s.begin(), s.end());
    }();
    GraphMatrix g{{0, 0, 0, 0}};
    std::uniform_int_distribution<std::size_t> pick_unit(0, units.size() - 1);
    while (static_cast<int>(g.size()) < n) {
        std::uniform_int_distribution<std::size_t> pick_vertex(0, g.size() - 1);
        const LatticePoint p = g[pick_vertex(rng)] + units[pick_unit(rng)];
        if (std::find(g.begin(), g.end(), p) == g.end()) g.push_back(p);
    }
    return g;
}

// Connected graph that canonizes inside the box.
inline CanonicalGraph random_canonical_graph(std::mt19937_64& rng, int n, const ZobristTable& table) {
    while (true)
        if (auto c = canonize(random_connected_graph(rng, n), table)) return *c;
}

inline GraphMatrix permute_rows(std::span<const LatticePoint> g, std::mt19937_64& rng) {
    GraphMatrix out(g.begin(), g.end());
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("udg_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace udg::test
