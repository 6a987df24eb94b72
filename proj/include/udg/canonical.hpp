#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "udg/lattice.hpp"

namespace udg {

using GraphMatrix = std::vector<LatticePoint>;

// Translation-normalized coefficients live in [0, kMaxCoef]; kBoxSize^4 point codes.
inline constexpr std::int32_t kBoxSize = 21;
inline constexpr std::int32_t kMaxCoef = kBoxSize - 1;
inline constexpr std::uint32_t kNumCodes = 194481;  // 21^4
inline constexpr int kNumSymmetries = 12;

class OutOfBoundsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// 4x4 integer matrix acting on row vectors: p' = p * m.
struct Mat4 {
    std::array<std::array<std::int32_t, 4>, 4> m{};

    friend bool operator==(const Mat4&, const Mat4&) = default;
};

Mat4 operator*(const Mat4& x, const Mat4& y);
LatticePoint operator*(const LatticePoint& p, const Mat4& m);

Mat4 identity_matrix();
/// Rotation by pi/3 (multiplication by w1).
Mat4 rotation_matrix();
/// z -> w1*w3*conj(z): swaps 1 <-> w1w3 and w1 <-> w3.
Mat4 reflection_matrix();

/// [I, Ro, ..., Ro^5, Re, Re*Ro, ..., Re*Ro^5]
const std::array<Mat4, kNumSymmetries>& symmetries();

GraphMatrix apply_symmetry(std::span<const LatticePoint> g, int t);

/// Shifts each column so its minimum is 0. Throws OutOfBoundsError when a
/// shifted coefficient exceeds kMaxCoef.
GraphMatrix normalize_translation(std::span<const LatticePoint> g);

constexpr std::uint32_t point_code(const LatticePoint& p) {
    return static_cast<std::uint32_t>(p[0] + kBoxSize * (p[1] + kBoxSize * (p[2] + kBoxSize * p[3])));
}

constexpr LatticePoint point_from_code(std::uint32_t code) {
    LatticePoint p;
    for (std::size_t i = 0; i < 4; ++i) {
        p[i] = static_cast<std::int32_t>(code % kBoxSize);
        code /= kBoxSize;
    }
    return p;
}

constexpr bool in_box(const LatticePoint& p) {
    for (auto x : p.c)
        if (x < 0 || x > kMaxCoef) return false;
    return true;
}

bool has_distinct_rows(std::span<const LatticePoint> g);

/// One random 64-bit key per point code. Immutable after construction.
class ZobristTable {
public:
    static constexpr std::uint64_t kDefaultSeed = 0x5EED1D60C0FFEEULL;

    explicit ZobristTable(std::uint64_t seed = kDefaultSeed);

    std::uint64_t key(std::uint32_t code) const { return keys_[code]; }
    std::span<const std::uint64_t> keys() const { return keys_; }
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::vector<std::uint64_t> keys_;
};

/// XOR of the keys of every row; rows must already be inside the box.
std::uint64_t zobrist_hash(std::span<const LatticePoint> g, const ZobristTable& table);

// Dense m x n x 4 batch of graphs sharing a vertex count.
class GraphBatch {
public:
    GraphBatch() = default;
    explicit GraphBatch(std::size_t vertex_count) : n_(vertex_count) {}

    std::size_t vertex_count() const { return n_; }
    std::size_t size() const { return n_ == 0 ? 0 : rows_.size() / n_; }
    bool empty() const { return rows_.empty(); }

    std::span<const LatticePoint> graph(std::size_t i) const { return {rows_.data() + i * n_, n_}; }
    std::span<LatticePoint> graph(std::size_t i) { return {rows_.data() + i * n_, n_}; }
    std::span<const LatticePoint> rows() const { return rows_; }

    void push_back(std::span<const LatticePoint> g);
    void reserve(std::size_t graphs) { rows_.reserve(graphs * n_); }
    void append(const GraphBatch& other);

private:
    std::size_t n_ = 0;
    std::vector<LatticePoint> rows_;
};

struct CanonicalGraph {
    GraphMatrix matrix;
    std::uint64_t hash = 0;

    friend bool operator==(const CanonicalGraph&, const CanonicalGraph&) = default;
};

// Canonical graphs plus their hashes, index-aligned.
struct CanonicalBatch {
    GraphBatch graphs;
    std::vector<std::uint64_t> hashes;

    CanonicalBatch() = default;
    explicit CanonicalBatch(std::size_t vertex_count) : graphs(vertex_count) {}

    std::size_t size() const { return hashes.size(); }
    bool empty() const { return hashes.empty(); }
    std::size_t vertex_count() const { return graphs.vertex_count(); }
    CanonicalGraph at(std::size_t i) const;
    void push_back(std::span<const LatticePoint> g, std::uint64_t hash);
    void append(const CanonicalBatch& other);
};

/// Canonical representative under the 12 symmetries, translation and row
/// order. std::nullopt if every symmetry image overflows the box.
std::optional<CanonicalGraph> canonize(std::span<const LatticePoint> g, const ZobristTable& table);

struct CanonizeResult {
    CanonicalBatch graphs;
    std::size_t dropped_oob = 0;

    std::size_t size() const { return graphs.size(); }
    void append(const CanonizeResult& other) {
        graphs.append(other.graphs);
        dropped_oob += other.dropped_oob;
    }
};

/// Canonizes each graph independently (no deduplication); out-of-box graphs
/// are dropped and counted.
CanonizeResult canonize_batch(const GraphBatch& batch, const ZobristTable& table);

/// Sorts rows ascending by point code. Rows must be inside the box.
void sort_rows_by_code(std::span<LatticePoint> g);

}  // namespace udg
