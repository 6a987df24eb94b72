#include "udg/canonical.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace udg {

Mat4 operator*(const Mat4& x, const Mat4& y) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            std::int32_t s = 0;
            for (int k = 0; k < 4; ++k) s += x.m[i][k] * y.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

LatticePoint operator*(const LatticePoint& p, const Mat4& m) {
    LatticePoint r;
    for (int j = 0; j < 4; ++j) r[j] = p[0] * m.m[0][j] + p[1] * m.m[1][j] + p[2] * m.m[2][j] + p[3] * m.m[3][j];
    return r;
}

Mat4 identity_matrix() { return Mat4{{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}}}; }

Mat4 rotation_matrix() { return Mat4{{{{0, 1, 0, 0}, {-1, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 1}}}}; }

Mat4 reflection_matrix() { return Mat4{{{{0, 0, 0, 1}, {0, 0, 1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}}}}; }

const std::array<Mat4, kNumSymmetries>& symmetries() {
    static const std::array<Mat4, kNumSymmetries> all = [] {
        std::array<Mat4, kNumSymmetries> r;
        const Mat4 ro = rotation_matrix();
        r[0] = identity_matrix();
        r[6] = reflection_matrix();
        for (int k = 1; k < 6; ++k) {
            r[k] = r[k - 1] * ro;
            r[6 + k] = r[6 + k - 1] * ro;
        }
        return r;
    }();
    return all;
}

GraphMatrix apply_symmetry(std::span<const LatticePoint> g, int t) {
    const Mat4& m = symmetries().at(static_cast<std::size_t>(t));
    GraphMatrix out;
    out.reserve(g.size());
    for (const auto& p : g) out.push_back(p * m);
    return out;
}

namespace {

LatticePoint column_min(std::span<const LatticePoint> g) {
    LatticePoint lo{std::numeric_limits<std::int32_t>::max(), std::numeric_limits<std::int32_t>::max(),
                    std::numeric_limits<std::int32_t>::max(), std::numeric_limits<std::int32_t>::max()};
    for (const auto& p : g)
        for (std::size_t i = 0; i < 4; ++i) lo[i] = std::min(lo[i], p[i]);
    return lo;
}

}  // namespace

GraphMatrix normalize_translation(std::span<const LatticePoint> g) {
    if (g.empty()) return {};
    const LatticePoint lo = column_min(g);
    GraphMatrix out;
    out.reserve(g.size());
    for (const auto& p : g) {
        const LatticePoint q = p - lo;
        if (!in_box(q)) throw OutOfBoundsError("graph does not fit the coefficient box after translation");
        out.push_back(q);
    }
    return out;
}

bool has_distinct_rows(std::span<const LatticePoint> g) {
    std::vector<LatticePoint> sorted(g.begin(), g.end());
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

ZobristTable::ZobristTable(std::uint64_t seed) : seed_(seed), keys_(kNumCodes) {
    std::mt19937_64 rng(seed);
    for (auto& k : keys_) k = rng();
}

std::uint64_t zobrist_hash(std::span<const LatticePoint> g, const ZobristTable& table) {
    std::uint64_t h = 0;
    for (const auto& p : g) h ^= table.key(point_code(p));
    return h;
}

void GraphBatch::push_back(std::span<const LatticePoint> g) {
    if (n_ == 0 && rows_.empty()) n_ = g.size();
    if (g.size() != n_) throw std::invalid_argument("graph vertex count does not match batch");
    rows_.insert(rows_.end(), g.begin(), g.end());
}

void GraphBatch::append(const GraphBatch& other) {
    if (other.empty()) return;
    if (rows_.empty()) n_ = other.n_;
    if (other.n_ != n_) throw std::invalid_argument("batch vertex counts differ");
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

CanonicalGraph CanonicalBatch::at(std::size_t i) const {
    const auto g = graphs.graph(i);
    return {GraphMatrix(g.begin(), g.end()), hashes[i]};
}

void CanonicalBatch::push_back(std::span<const LatticePoint> g, std::uint64_t hash) {
    graphs.push_back(g);
    hashes.push_back(hash);
}

void CanonicalBatch::append(const CanonicalBatch& other) {
    graphs.append(other.graphs);
    hashes.insert(hashes.end(), other.hashes.begin(), other.hashes.end());
}

void sort_rows_by_code(std::span<LatticePoint> g) {
    std::sort(g.begin(), g.end(),
              [](const LatticePoint& x, const LatticePoint& y) { return point_code(x) < point_code(y); });
}

std::optional<CanonicalGraph> canonize(std::span<const LatticePoint> g, const ZobristTable& table) {
    const auto& syms = symmetries();
    GraphMatrix image(g.size());
    GraphMatrix best;
    std::uint64_t best_hash = 0;
    bool found = false;

    for (int s = 0; s < kNumSymmetries; ++s) {
        for (std::size_t j = 0; j < g.size(); ++j) image[j] = g[j] * syms[s];
        const LatticePoint lo = g.empty() ? LatticePoint{} : column_min(image);
        bool fits = true;
        std::uint64_t h = 0;
        for (auto& p : image) {
            p = p - lo;
            if (!in_box(p)) {
                fits = false;
                break;
            }
            h ^= table.key(point_code(p));
        }
        if (!fits) continue;
        // Strict comparison: the lowest symmetry index wins ties.
        if (!found || h > best_hash) {
            found = true;
            best_hash = h;
            best = image;
        }
    }
    if (!found) return std::nullopt;
    sort_rows_by_code(best);
    return CanonicalGraph{std::move(best), best_hash};
}

CanonizeResult canonize_batch(const GraphBatch& batch, const ZobristTable& table) {
    CanonizeResult out{CanonicalBatch(batch.vertex_count()), 0};
    out.graphs.graphs.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        auto c = canonize(batch.graph(i), table);
        if (!c) {
            ++out.dropped_oob;
            continue;
        }
        out.graphs.push_back(c->matrix, c->hash);
    }
    return out;
}

}  // namespace udg
