#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "udg/canonical.hpp"
#include "udg/lattice.hpp"

namespace udg {

using EdgeSet = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

/// All (i, j), i < j, with rows i and j at exact unit distance.
EdgeSet edge_set(std::span<const LatticePoint> g);
int edge_count(std::span<const LatticePoint> g);
bool is_connected(std::span<const LatticePoint> g);

/// The eight generator offsets {+-1, +-w1, +-w3, +-w1w3}.
std::span<const LatticePoint> generator_offsets();

// Raw candidate vertices, before duplicate filtering.
std::vector<LatticePoint> op1_vertices(std::span<const LatticePoint> g);
std::vector<LatticePoint> op2_vertices(std::span<const LatticePoint> g);
std::vector<LatticePoint> op3_vertices(std::span<const LatticePoint> g);

// Each returns the (n+1)-row matrices (parent rows then the new row) for
// every raw candidate that is not already a vertex. No canonization.
GraphBatch children_op1(const GraphBatch& gs);
GraphBatch children_op2(const GraphBatch& gs);
GraphBatch children_op3(const GraphBatch& gs);

// A child described relative to its parent: the parent's symmetry image
// `symmetry` plus `vertex` (in the parent's coordinates) canonizes to `hash`.
struct ChildCandidate {
    std::uint64_t hash = 0;
    std::uint32_t parent = 0;
    std::int32_t edges = 0;
    LatticePoint vertex;
    std::uint8_t symmetry = 0;
};

struct GenealogyResult {
    CanonicalBatch graphs;
    std::vector<std::int32_t> edges;
    std::size_t dropped_oob = 0;
    std::size_t disconnected = 0;

    std::size_t size() const { return graphs.size(); }
    void append(const GenealogyResult& other);
};

/// Keeps the first occurrence of every hash, preserving order.
void dedup_by_hash(GenealogyResult& r);
void dedup_by_hash(std::vector<ChildCandidate>& cs);

// Children/parents of canonical graphs. Holds scratch lookup tables sized for
// the extended coefficient range, so reuse one instance per thread.
class Genealogy {
public:
    explicit Genealogy(const ZobristTable& table);

    const ZobristTable& table() const { return *table_; }

    /// Every distinct (per parent) child candidate of op1/op2/op3, with its
    /// canonical hash and edge count. Not deduplicated across parents.
    std::vector<ChildCandidate> child_candidates(const CanonicalBatch& parents, std::size_t* dropped_oob = nullptr);

    CanonicalGraph materialize(const CanonicalBatch& parents, const ChildCandidate& c) const;

    /// Canonized, hash-deduplicated children.
    GenealogyResult children(const CanonicalBatch& parents);

    /// Canonized, hash-deduplicated connected vertex-deleted subgraphs.
    GenealogyResult parents(const CanonicalBatch& gs);

private:
    static constexpr std::int32_t kOffset = 4;
    static constexpr std::int32_t kBase = kBoxSize + 2 * kOffset;

    static std::int32_t slot_of(const LatticePoint& p);
    int find(const LatticePoint& p) const;
    void load(std::span<const LatticePoint> g);
    void unload(std::span<const LatticePoint> g);
    void build_adjacency(std::span<const LatticePoint> g);

    const ZobristTable* table_;
    std::vector<std::int16_t> slots_;  // vertex index + 1, 0 when empty
    std::vector<std::uint8_t> marks_;
    std::vector<std::uint32_t> adj_begin_;
    std::vector<std::uint32_t> adj_;
};

/// Convenience wrappers using a temporary Genealogy.
GenealogyResult children(const CanonicalBatch& gs, const ZobristTable& table);
GenealogyResult parents(const CanonicalBatch& gs, const ZobristTable& table);

}  // namespace udg
