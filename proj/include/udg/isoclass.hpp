#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "udg/canonical.hpp"

namespace udg {

// Simple undirected graph as a dense symmetric adjacency matrix.
class AbstractGraph {
public:
    AbstractGraph() = default;
    explicit AbstractGraph(int n) : n_(n), adj_(static_cast<std::size_t>(n) * n, 0) {}
    AbstractGraph(int n, std::span<const std::pair<int, int>> edges);

    int size() const { return n_; }
    bool adjacent(int i, int j) const { return adj_[static_cast<std::size_t>(i) * n_ + j] != 0; }
    void add_edge(int i, int j);
    int edge_count() const;
    int degree(int v) const;
    /// Relabels vertex v as perm[v].
    AbstractGraph permuted(std::span<const int> perm) const;

private:
    int n_ = 0;
    std::vector<std::uint8_t> adj_;
};

/// Forgets the embedding; adjacency is exact unit distance.
AbstractGraph to_abstract(std::span<const LatticePoint> g);

/// Byte string equal for two graphs iff they are isomorphic. Colour refinement
/// to an equitable partition, then individualization over the first smallest
/// non-trivial cell; the label is the lexicographically least adjacency string
/// among leaves on the least invariant path.
std::string canonical_label(const AbstractGraph& g);

std::size_t count_iso_classes(std::span<const GraphMatrix> gs);

struct MinkowskiSum {
    GraphMatrix matrix;  // distinct points, lexicographically sorted
    bool disjoint = false;  // |A+B| == |A||B|
};

/// {a + b}. Throws OutOfBoundsError if the result does not fit the
/// coefficient box after translation normalization.
MinkowskiSum minkowski_sum(std::span<const LatticePoint> a, std::span<const LatticePoint> b);

}  // namespace udg
