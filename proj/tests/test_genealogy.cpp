#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "support.hpp"
#include "udg/genealogy.hpp"
#include "udg/search.hpp"

using namespace udg;

namespace {

CanonicalBatch single(const CanonicalGraph& c) {
    CanonicalBatch b(c.matrix.size());
    b.push_back(c.matrix, c.hash);
    return b;
}

GraphBatch raw_batch(std::span<const LatticePoint> g) {
    GraphBatch b(g.size());
    b.push_back(g);
    return b;
}

bool contains(const std::vector<LatticePoint>& xs, const LatticePoint& p) {
    return std::find(xs.begin(), xs.end(), p) != xs.end();
}

// Hash -> edge count of every raw child, canonized one by one.
std::map<std::uint64_t, int> slow_children(const CanonicalGraph& g, const ZobristTable& table) {
    std::map<std::uint64_t, int> out;
    const auto raw = raw_batch(g.matrix);
    for (const auto& batch : {children_op1(raw), children_op2(raw), children_op3(raw)})
        for (std::size_t i = 0; i < batch.size(); ++i)
            if (auto c = canonize(batch.graph(i), table)) out[c->hash] = test::float_edge_count(c->matrix);
    return out;
}

}  // namespace

TEST_CASE("edge_count against the floating oracle") {
    CHECK(edge_count(GraphMatrix{{0, 0, 0, 0}}) == 0);
    CHECK(edge_count(moser_spindle()) == 11);
    CHECK(test::float_edge_count(moser_spindle()) == 11);
    const GraphMatrix triangle{{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}};
    CHECK(edge_count(triangle) == 3);
    CHECK(edge_set(triangle) == EdgeSet{{0, 1}, {0, 2}, {1, 2}});
    std::mt19937_64 rng(17);
    for (int i = 0; i < 300; ++i) {
        const auto g = test::random_connected_graph(rng, 2 + static_cast<int>(rng() % 20));
        CHECK(edge_count(g) == test::float_edge_count(g));
    }
}

TEST_CASE("is_connected") {
    CHECK(is_connected(moser_spindle()));
    CHECK_FALSE(is_connected(GraphMatrix{{0, 0, 0, 0}, {2, 0, 0, 0}}));
    CHECK(is_connected(GraphMatrix{{0, 0, 0, 0}}));
}

TEST_CASE("op1 on a single vertex gives the eight generator offsets") {
    const auto xs = op1_vertices(GraphMatrix{{0, 0, 0, 0}});
    REQUIRE(xs.size() == 8);
    for (const auto& x : xs) CHECK(is_unit(x));
    CHECK(std::set<LatticePoint>(xs.begin(), xs.end()).size() == 8);
}

TEST_CASE("op1 on the spindle gives 56 raw candidates") {
    CHECK(op1_vertices(moser_spindle()).size() == 56);
}

TEST_CASE("op2 completes unit triangles on an edge") {
    const GraphMatrix edge{{0, 0, 0, 0}, {1, 0, 0, 0}};
    const auto xs = op2_vertices(edge);
    CHECK(contains(xs, {0, 1, 0, 0}));
    CHECK(contains(xs, {1, -1, 0, 0}));
}

TEST_CASE("op3 reflects the middle of a path") {
    const GraphMatrix path{{1, 0, 0, 0}, {0, 0, 0, 0}, {0, 1, 0, 0}};
    CHECK(contains(op3_vertices(path), {1, 1, 0, 0}));
}

TEST_CASE("op2 and op3 vertices are sound") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 100; ++i) {
        const auto g = test::random_connected_graph(rng, 3 + static_cast<int>(rng() % 10));
        for (const auto& x : op2_vertices(g)) {
            int hits = 0;
            for (const auto& p : g) hits += is_unit_distance(x, p) ? 1 : 0;
            CHECK(hits >= 2);
        }
        for (const auto& x : op3_vertices(g)) {
            int hits = 0;
            for (const auto& p : g) hits += is_unit_distance(x, p) ? 1 : 0;
            CHECK((hits >= 2 || contains(GraphMatrix(g.begin(), g.end()), x)));
        }
    }
}

TEST_CASE("raw children strictly extend the parent by one row") {
    const auto raw = raw_batch(moser_spindle());
    for (const auto& batch : {children_op1(raw), children_op2(raw), children_op3(raw)}) {
        REQUIRE(batch.vertex_count() == 8);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const auto c = batch.graph(i);
            CHECK(std::equal(c.begin(), c.begin() + 7, moser_spindle().begin()));
            CHECK(has_distinct_rows(c));
        }
    }
}

TEST_CASE("spindle children: best edge count matches an exhaustive oracle") {
    // Every lattice point at unit distance from some spindle vertex is a
    // possible new vertex; no point reaches three spindle vertices.
    int best_degree = 0;
    const auto spindle_rows = moser_spindle();
    for (const auto& v : spindle_rows)
        for (const auto& u : test::published_units()) {
            const auto x = v + u;
            if (contains(spindle_rows, x)) continue;
            int d = 0;
            for (const auto& w : spindle_rows) d += test::float_unit_distance(w, x) ? 1 : 0;
            best_degree = std::max(best_degree, d);
        }
    CHECK(best_degree == 2);

    const ZobristTable table;
    const auto spindle = *canonize(moser_spindle(), table);
    const auto r = children(single(spindle), table);
    REQUIRE(r.size() > 0);
    CHECK(*std::max_element(r.edges.begin(), r.edges.end()) == 11 + best_degree);
}

TEST_CASE("fast children match canonizing every raw child") {
    const ZobristTable table;
    Genealogy gen(table);
    std::mt19937_64 rng(23);
    for (int i = 0; i < 60; ++i) {
        const auto g = test::random_canonical_graph(rng, 3 + static_cast<int>(rng() % 12), table);
        const auto want = slow_children(g, table);
        const auto got = gen.children(single(g));
        std::map<std::uint64_t, int> have;
        for (std::size_t k = 0; k < got.size(); ++k) {
            have[got.graphs.hashes[k]] = got.edges[k];
            const auto c = got.graphs.at(k);
            CHECK(c.hash == zobrist_hash(c.matrix, table));
            CHECK(canonize(c.matrix, table)->matrix == c.matrix);
        }
        CHECK(have == want);
    }
}

TEST_CASE("parents examples") {
    const ZobristTable table;
    const auto triangle = *canonize(GraphMatrix{{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}}, table);
    const auto edge = *canonize(GraphMatrix{{0, 0, 0, 0}, {1, 0, 0, 0}}, table);
    const auto vertex = *canonize(GraphMatrix{{0, 0, 0, 0}}, table);
    const auto p3 = parents(single(triangle), table);
    REQUIRE(p3.size() == 1);
    CHECK(p3.graphs.at(0) == edge);
    const auto p2 = parents(single(edge), table);
    REQUIRE(p2.size() == 1);
    CHECK(p2.graphs.at(0) == vertex);
}

TEST_CASE("parents are connected, at most n, and drop disconnected deletions") {
    const ZobristTable table;
    // Path of three: deleting the middle disconnects it.
    const auto path = *canonize(GraphMatrix{{0, 0, 0, 0}, {1, 0, 0, 0}, {2, 0, 0, 0}}, table);
    const auto r = parents(single(path), table);
    CHECK(r.size() == 1);
    CHECK(r.disconnected == 1);
    std::mt19937_64 rng(29);
    for (int i = 0; i < 100; ++i) {
        const auto g = test::random_canonical_graph(rng, 3 + static_cast<int>(rng() % 12), table);
        const auto ps = parents(single(g), table);
        CHECK(ps.size() <= g.matrix.size());
        for (std::size_t k = 0; k < ps.size(); ++k) CHECK(is_connected(ps.graphs.graphs.graph(k)));
    }
}

TEST_CASE("child/parent duality and the +18 edge bound") {
    const ZobristTable table;
    Genealogy gen(table);
    std::mt19937_64 rng(31);
    for (int i = 0; i < 40; ++i) {
        const auto g = test::random_canonical_graph(rng, 5 + static_cast<int>(rng() % 8), table);
        const int e = edge_count(g.matrix);
        const auto cs = gen.children(single(g));
        for (std::size_t k = 0; k < cs.size(); ++k) {
            CHECK(cs.edges[k] <= e + 18);
            const auto ps = gen.parents(single(cs.graphs.at(k)));
            CHECK(std::find(ps.graphs.hashes.begin(), ps.graphs.hashes.end(), g.hash) != ps.graphs.hashes.end());
        }
    }
}

TEST_CASE("dedup_by_hash keeps first occurrences in order") {
    GenealogyResult r;
    r.graphs = CanonicalBatch(1);
    for (std::uint64_t h : {5, 3, 5, 7, 3}) {
        r.graphs.push_back(GraphMatrix{{static_cast<std::int32_t>(h), 0, 0, 0}}, h);
        r.edges.push_back(static_cast<std::int32_t>(h));
    }
    dedup_by_hash(r);
    CHECK(r.graphs.hashes == std::vector<std::uint64_t>{5, 3, 7});
    CHECK(r.edges == std::vector<std::int32_t>{5, 3, 7});
}
