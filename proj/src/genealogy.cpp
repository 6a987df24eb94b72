#include "udg/genealogy.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <numeric>
#include <unordered_set>

namespace udg {

namespace {

std::vector<std::vector<std::uint32_t>> adjacency_lists(std::span<const LatticePoint> g) {
    std::vector<std::vector<std::uint32_t>> adj(g.size());
    for (std::uint32_t i = 0; i < g.size(); ++i)
        for (std::uint32_t j = i + 1; j < g.size(); ++j)
            if (is_unit_distance(g[i], g[j])) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
    return adj;
}

GraphBatch extend_each(const GraphBatch& gs, std::vector<LatticePoint> (*op)(std::span<const LatticePoint>)) {
    GraphBatch out(gs.vertex_count() + 1);
    GraphMatrix child;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const auto g = gs.graph(i);
        const std::vector<LatticePoint> rows(g.begin(), g.end());
        for (const auto& x : op(g)) {
            if (std::find(rows.begin(), rows.end(), x) != rows.end()) continue;
            child = rows;
            child.push_back(x);
            out.push_back(child);
        }
    }
    return out;
}

// Per-parent symmetry images, translation-normalized, with their point codes.
struct ImageSet {
    std::array<LatticePoint, kNumSymmetries> lo{};
    std::array<LatticePoint, kNumSymmetries> extent{};
    std::array<std::uint64_t, kNumSymmetries> hash{};
    std::array<bool, kNumSymmetries> valid{};
    std::vector<std::uint32_t> codes;  // kNumSymmetries * n

    void build(std::span<const LatticePoint> g, const ZobristTable& table) {
        const auto& syms = symmetries();
        const std::size_t n = g.size();
        codes.resize(kNumSymmetries * n);
        std::vector<LatticePoint> img(n);
        for (int s = 0; s < kNumSymmetries; ++s) {
            LatticePoint mn = g[0] * syms[s], mx = mn;
            for (std::size_t j = 0; j < n; ++j) {
                img[j] = g[j] * syms[s];
                for (std::size_t k = 0; k < 4; ++k) {
                    mn[k] = std::min(mn[k], img[j][k]);
                    mx[k] = std::max(mx[k], img[j][k]);
                }
            }
            lo[s] = mn;
            extent[s] = mx - mn;
            valid[s] = in_box(extent[s]);
            std::uint64_t h = 0;
            if (valid[s])
                for (std::size_t j = 0; j < n; ++j) {
                    const std::uint32_t code = point_code(img[j] - mn);
                    codes[s * n + j] = code;
                    h ^= table.key(code);
                }
            hash[s] = h;
        }
    }

    // Canonical hash of the parent plus x; false if every image overflows.
    bool extend_hash(const LatticePoint& x, std::size_t n, const ZobristTable& table, std::uint64_t& best,
                     std::uint8_t& best_sym) const {
        const auto& syms = symmetries();
        bool found = false;
        for (int s = 0; s < kNumSymmetries; ++s) {
            if (!valid[s]) continue;
            const LatticePoint xs = x * syms[s];
            LatticePoint delta, rel;
            bool fits = true, shifted = false;
            for (std::size_t k = 0; k < 4; ++k) {
                const std::int32_t new_lo = std::min(lo[s][k], xs[k]);
                delta[k] = lo[s][k] - new_lo;
                rel[k] = xs[k] - new_lo;
                shifted |= delta[k] != 0;
                if (rel[k] > kMaxCoef || extent[s][k] + delta[k] > kMaxCoef) fits = false;
            }
            if (!fits) continue;
            std::uint64_t h = table.key(point_code(rel));
            if (!shifted) {
                h ^= hash[s];
            } else {
                const std::uint32_t dcode = point_code(delta);
                const std::uint32_t* c = codes.data() + s * n;
                for (std::size_t j = 0; j < n; ++j) h ^= table.key(c[j] + dcode);
            }
            if (!found || h > best) {
                found = true;
                best = h;
                best_sym = static_cast<std::uint8_t>(s);
            }
        }
        return found;
    }
};

}  // namespace

EdgeSet edge_set(std::span<const LatticePoint> g) {
    EdgeSet e;
    for (std::uint32_t i = 0; i < g.size(); ++i)
        for (std::uint32_t j = i + 1; j < g.size(); ++j)
            if (is_unit_distance(g[i], g[j])) e.emplace_back(i, j);
    return e;
}

int edge_count(std::span<const LatticePoint> g) {
    int count = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j) count += is_unit_distance(g[i], g[j]) ? 1 : 0;
    return count;
}

bool is_connected(std::span<const LatticePoint> g) {
    if (g.empty()) return true;
    const auto adj = adjacency_lists(g);
    std::vector<bool> seen(g.size(), false);
    std::vector<std::uint32_t> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                ++reached;
                stack.push_back(w);
            }
    }
    return reached == g.size();
}

std::span<const LatticePoint> generator_offsets() {
    static const std::array<LatticePoint, 8> offsets{
        LatticePoint{1, 0, 0, 0},  LatticePoint{-1, 0, 0, 0}, LatticePoint{0, 1, 0, 0},  LatticePoint{0, -1, 0, 0},
        LatticePoint{0, 0, 1, 0},  LatticePoint{0, 0, -1, 0}, LatticePoint{0, 0, 0, 1},  LatticePoint{0, 0, 0, -1},
    };
    return offsets;
}

std::vector<LatticePoint> op1_vertices(std::span<const LatticePoint> g) {
    std::vector<LatticePoint> out;
    out.reserve(g.size() * 8);
    for (const auto& v : g)
        for (const auto& off : generator_offsets()) out.push_back(v + off);
    return out;
}

std::vector<LatticePoint> op2_vertices(std::span<const LatticePoint> g) {
    const Mat4 ro = rotation_matrix();
    std::vector<LatticePoint> out;
    const auto adj = adjacency_lists(g);
    for (std::size_t u = 0; u < g.size(); ++u)
        for (auto v : adj[u]) out.push_back(g[u] + (g[v] - g[u]) * ro);
    return out;
}

std::vector<LatticePoint> op3_vertices(std::span<const LatticePoint> g) {
    std::vector<LatticePoint> out;
    const auto adj = adjacency_lists(g);
    for (std::size_t v = 0; v < g.size(); ++v)
        for (std::size_t a = 0; a < adj[v].size(); ++a)
            for (std::size_t b = a + 1; b < adj[v].size(); ++b) out.push_back(g[adj[v][a]] + g[adj[v][b]] - g[v]);
    return out;
}

GraphBatch children_op1(const GraphBatch& gs) { return extend_each(gs, op1_vertices); }
GraphBatch children_op2(const GraphBatch& gs) { return extend_each(gs, op2_vertices); }
GraphBatch children_op3(const GraphBatch& gs) { return extend_each(gs, op3_vertices); }

void GenealogyResult::append(const GenealogyResult& other) {
    graphs.append(other.graphs);
    edges.insert(edges.end(), other.edges.begin(), other.edges.end());
    dropped_oob += other.dropped_oob;
    disconnected += other.disconnected;
}

void dedup_by_hash(GenealogyResult& r) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(r.size() * 2);
    GenealogyResult out;
    out.graphs = CanonicalBatch(r.graphs.vertex_count());
    out.dropped_oob = r.dropped_oob;
    out.disconnected = r.disconnected;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!seen.insert(r.graphs.hashes[i]).second) continue;
        out.graphs.push_back(r.graphs.graphs.graph(i), r.graphs.hashes[i]);
        out.edges.push_back(r.edges[i]);
    }
    r = std::move(out);
}

void dedup_by_hash(std::vector<ChildCandidate>& cs) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(cs.size() * 2);
    std::size_t w = 0;
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (seen.insert(cs[i].hash).second) cs[w++] = cs[i];
    cs.resize(w);
}

Genealogy::Genealogy(const ZobristTable& table)
    : table_(&table),
      slots_(static_cast<std::size_t>(kBase) * kBase * kBase * kBase, 0),
      marks_(slots_.size(), 0) {}

std::int32_t Genealogy::slot_of(const LatticePoint& p) {
    std::int32_t s = 0;
    for (int k = 3; k >= 0; --k) {
        const std::int32_t x = p[static_cast<std::size_t>(k)] + kOffset;
        if (x < 0 || x >= kBase) return -1;
        s = s * kBase + x;
    }
    return s;
}

int Genealogy::find(const LatticePoint& p) const {
    const auto s = slot_of(p);
    return s < 0 ? -1 : slots_[static_cast<std::size_t>(s)] - 1;
}

void Genealogy::load(std::span<const LatticePoint> g) {
    for (std::size_t j = 0; j < g.size(); ++j) {
        const auto s = slot_of(g[j]);
        assert(s >= 0);
        slots_[static_cast<std::size_t>(s)] = static_cast<std::int16_t>(j + 1);
    }
}

void Genealogy::unload(std::span<const LatticePoint> g) {
    for (const auto& p : g) slots_[static_cast<std::size_t>(slot_of(p))] = 0;
}

void Genealogy::build_adjacency(std::span<const LatticePoint> g) {
    adj_begin_.assign(g.size() + 1, 0);
    adj_.clear();
    for (std::size_t j = 0; j < g.size(); ++j) {
        adj_begin_[j] = static_cast<std::uint32_t>(adj_.size());
        for (const auto& u : unit_vectors()) {
            const int k = find(g[j] + u);
            if (k >= 0) adj_.push_back(static_cast<std::uint32_t>(k));
        }
    }
    adj_begin_[g.size()] = static_cast<std::uint32_t>(adj_.size());
}

std::vector<ChildCandidate> Genealogy::child_candidates(const CanonicalBatch& parents, std::size_t* dropped_oob) {
    std::vector<ChildCandidate> out;
    const std::size_t n = parents.vertex_count();
    const Mat4 ro = rotation_matrix();
    ImageSet images;
    std::vector<LatticePoint> cand;
    std::vector<std::int32_t> marked;

    for (std::uint32_t pi = 0; pi < parents.size(); ++pi) {
        const auto g = parents.graphs.graph(pi);
        load(g);
        build_adjacency(g);
        const std::int32_t parent_edges = static_cast<std::int32_t>(adj_.size() / 2);

        cand.clear();
        marked.clear();
        auto offer = [&](const LatticePoint& x) {
            const auto s = slot_of(x);
            if (s < 0 || slots_[static_cast<std::size_t>(s)] != 0 || marks_[static_cast<std::size_t>(s)]) return;
            marks_[static_cast<std::size_t>(s)] = 1;
            marked.push_back(s);
            cand.push_back(x);
        };
        for (std::size_t j = 0; j < n; ++j)
            for (const auto& off : generator_offsets()) offer(g[j] + off);
        for (std::size_t u = 0; u < n; ++u)
            for (auto k = adj_begin_[u]; k < adj_begin_[u + 1]; ++k) offer(g[u] + (g[adj_[k]] - g[u]) * ro);
        for (std::size_t v = 0; v < n; ++v)
            for (auto a = adj_begin_[v]; a < adj_begin_[v + 1]; ++a)
                for (auto b = a + 1; b < adj_begin_[v + 1]; ++b) offer(g[adj_[a]] + g[adj_[b]] - g[v]);

        images.build(g, *table_);
        for (const auto& x : cand) {
            ChildCandidate c;
            if (!images.extend_hash(x, n, *table_, c.hash, c.symmetry)) {
                if (dropped_oob) ++*dropped_oob;
                continue;
            }
            std::int32_t deg = 0;
            for (const auto& u : unit_vectors()) deg += find(x + u) >= 0 ? 1 : 0;
            c.parent = pi;
            c.edges = parent_edges + deg;
            c.vertex = x;
            out.push_back(c);
        }
        for (auto s : marked) marks_[static_cast<std::size_t>(s)] = 0;
        unload(g);
    }
    return out;
}

CanonicalGraph Genealogy::materialize(const CanonicalBatch& parents, const ChildCandidate& c) const {
    const auto g = parents.graphs.graph(c.parent);
    const Mat4& m = symmetries()[c.symmetry];
    GraphMatrix rows;
    rows.reserve(g.size() + 1);
    for (const auto& p : g) rows.push_back(p * m);
    rows.push_back(c.vertex * m);
    GraphMatrix out = normalize_translation(rows);
    sort_rows_by_code(out);
    return {std::move(out), c.hash};
}

GenealogyResult Genealogy::children(const CanonicalBatch& parents) {
    GenealogyResult r;
    r.graphs = CanonicalBatch(parents.vertex_count() + 1);
    auto cs = child_candidates(parents, &r.dropped_oob);
    dedup_by_hash(cs);
    r.graphs.graphs.reserve(cs.size());
    for (const auto& c : cs) {
        const auto child = materialize(parents, c);
        r.graphs.push_back(child.matrix, child.hash);
        r.edges.push_back(c.edges);
    }
    return r;
}

GenealogyResult Genealogy::parents(const CanonicalBatch& gs) {
    GenealogyResult r;
    const std::size_t n = gs.vertex_count();
    if (n < 2) return r;
    r.graphs = CanonicalBatch(n - 1);
    GraphMatrix sub(n - 1);
    std::vector<std::uint8_t> seen(n);
    std::vector<std::uint32_t> stack;
    std::unordered_set<std::uint64_t> emitted;

    for (std::size_t gi = 0; gi < gs.size(); ++gi) {
        const auto g = gs.graphs.graph(gi);
        load(g);
        build_adjacency(g);
        unload(g);
        const auto edges = static_cast<std::int32_t>(adj_.size() / 2);
        for (std::uint32_t del = 0; del < n; ++del) {
            // Connectivity of g minus `del`.
            std::fill(seen.begin(), seen.end(), 0);
            seen[del] = 1;
            const std::uint32_t root = del == 0 ? 1 : 0;
            seen[root] = 1;
            stack.assign(1, root);
            std::size_t reached = 1;
            while (!stack.empty()) {
                const auto v = stack.back();
                stack.pop_back();
                for (auto k = adj_begin_[v]; k < adj_begin_[v + 1]; ++k)
                    if (!seen[adj_[k]]) {
                        seen[adj_[k]] = 1;
                        ++reached;
                        stack.push_back(adj_[k]);
                    }
            }
            if (reached != n - 1) {
                ++r.disconnected;
                continue;
            }
            for (std::size_t j = 0, w = 0; j < n; ++j)
                if (j != del) sub[w++] = g[j];
            auto c = canonize(sub, *table_);
            if (!c) {
                ++r.dropped_oob;
                continue;
            }
            if (!emitted.insert(c->hash).second) continue;
            r.graphs.push_back(c->matrix, c->hash);
            r.edges.push_back(edges - static_cast<std::int32_t>(adj_begin_[del + 1] - adj_begin_[del]));
        }
    }
    return r;
}

GenealogyResult children(const CanonicalBatch& gs, const ZobristTable& table) {
    Genealogy gen(table);
    return gen.children(gs);
}

GenealogyResult parents(const CanonicalBatch& gs, const ZobristTable& table) {
    Genealogy gen(table);
    return gen.parents(gs);
}

}  // namespace udg
