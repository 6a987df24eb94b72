#include "udg/isoclass.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

namespace udg {

AbstractGraph::AbstractGraph(int n, std::span<const std::pair<int, int>> edges) : AbstractGraph(n) {
    for (const auto& [i, j] : edges) add_edge(i, j);
}

void AbstractGraph::add_edge(int i, int j) {
    if (i == j) throw std::invalid_argument("self-loop");
    adj_[static_cast<std::size_t>(i) * n_ + j] = 1;
    adj_[static_cast<std::size_t>(j) * n_ + i] = 1;
}

int AbstractGraph::edge_count() const {
    return static_cast<int>(std::count(adj_.begin(), adj_.end(), std::uint8_t{1}) / 2);
}

int AbstractGraph::degree(int v) const {
    int d = 0;
    for (int j = 0; j < n_; ++j) d += adjacent(v, j) ? 1 : 0;
    return d;
}

AbstractGraph AbstractGraph::permuted(std::span<const int> perm) const {
    AbstractGraph out(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (adjacent(i, j)) out.add_edge(perm[i], perm[j]);
    return out;
}

AbstractGraph to_abstract(std::span<const LatticePoint> g) {
    const int n = static_cast<int>(g.size());
    AbstractGraph out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (is_unit_distance(g[i], g[j])) out.add_edge(i, j);
    return out;
}

namespace {

class Labeler {
public:
    explicit Labeler(const AbstractGraph& g) : g_(g), n_(g.size()), nbrs_(n_) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if (g.adjacent(i, j)) nbrs_[i].push_back(j);
    }

    std::string run() {
        std::vector<int> colors(n_, 0);
        search(std::move(colors), 0);
        return *best_leaf_;
    }

private:
    // Refines to the coarsest equitable partition finer than `colors`; colours
    // come out dense and ordered by (old colour, neighbour colour multiset).
    void refine(std::vector<int>& colors) const {
        int classes = count_classes(colors);
        std::vector<std::vector<int>> sig(n_);
        std::vector<int> order(n_);
        while (true) {
            for (int v = 0; v < n_; ++v) {
                sig[v].clear();
                sig[v].push_back(colors[v]);
                for (int w : nbrs_[v]) sig[v].push_back(colors[w]);
                std::sort(sig[v].begin() + 1, sig[v].end());
            }
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) { return sig[a] < sig[b]; });
            int c = 0;
            for (int k = 0; k < n_; ++k) {
                if (k > 0 && sig[order[k]] != sig[order[k - 1]]) ++c;
                colors[order[k]] = c;
            }
            const int next = n_ == 0 ? 0 : c + 1;
            if (next == classes) return;
            classes = next;
        }
    }

    static int count_classes(const std::vector<int>& colors) {
        return colors.empty() ? 0 : *std::max_element(colors.begin(), colors.end()) + 1;
    }

    // Quotient description of an equitable partition: cell sizes followed by
    // the neighbour count from each cell into every cell.
    std::vector<int> invariant(const std::vector<int>& colors) const {
        const int k = count_classes(colors);
        std::vector<int> size(k, 0), rep(k, -1);
        for (int v = 0; v < n_; ++v) {
            ++size[colors[v]];
            if (rep[colors[v]] < 0) rep[colors[v]] = v;
        }
        std::vector<int> inv(size);
        std::vector<int> counts(k);
        for (int c = 0; c < k; ++c) {
            std::fill(counts.begin(), counts.end(), 0);
            for (int w : nbrs_[rep[c]]) ++counts[colors[w]];
            inv.insert(inv.end(), counts.begin(), counts.end());
        }
        return inv;
    }

    std::string leaf_string(const std::vector<int>& colors) const {
        // colors is a permutation: vertex v sits at position colors[v].
        std::vector<int> at(n_);
        for (int v = 0; v < n_; ++v) at[colors[v]] = v;
        std::string s;
        s.push_back(static_cast<char>(n_ & 0xff));
        s.push_back(static_cast<char>((n_ >> 8) & 0xff));
        unsigned char byte = 0;
        int bits = 0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                byte = static_cast<unsigned char>((byte << 1) | (g_.adjacent(at[i], at[j]) ? 1 : 0));
                if (++bits == 8) {
                    s.push_back(static_cast<char>(byte));
                    byte = 0;
                    bits = 0;
                }
            }
        if (bits > 0) s.push_back(static_cast<char>(byte << (8 - bits)));
        return s;
    }

    void search(std::vector<int> colors, std::size_t depth) {
        refine(colors);
        const auto inv = invariant(colors);
        if (depth < best_path_.size()) {
            if (inv > best_path_[depth]) return;
            if (inv < best_path_[depth]) {
                best_path_.resize(depth);
                best_path_.push_back(inv);
                best_leaf_.reset();
            }
        } else {
            best_path_.push_back(inv);
        }

        const int k = count_classes(colors);
        if (k == n_) {
            auto leaf = leaf_string(colors);
            if (!best_leaf_ || leaf < *best_leaf_) best_leaf_ = std::move(leaf);
            return;
        }

        // Target: first smallest non-singleton cell.
        std::vector<int> size(k, 0);
        for (int c : colors) ++size[c];
        int target = -1;
        for (int c = 0; c < k; ++c)
            if (size[c] > 1 && (target < 0 || size[c] < size[target])) target = c;

        for (int v = 0; v < n_; ++v) {
            if (colors[v] != target) continue;
            std::vector<int> next(n_);
            for (int w = 0; w < n_; ++w) next[w] = 2 * colors[w] + (colors[w] == target && w != v ? 1 : 0);
            search(std::move(next), depth + 1);
        }
    }

    const AbstractGraph& g_;
    int n_;
    std::vector<std::vector<int>> nbrs_;
    std::vector<std::vector<int>> best_path_;
    std::optional<std::string> best_leaf_;
};

}  // namespace

std::string canonical_label(const AbstractGraph& g) {
    if (g.size() == 0) return std::string(2, '\0');
    return Labeler(g).run();
}

std::size_t count_iso_classes(std::span<const GraphMatrix> gs) {
    std::set<std::string> labels;
    for (const auto& g : gs) labels.insert(canonical_label(to_abstract(g)));
    return labels.size();
}

MinkowskiSum minkowski_sum(std::span<const LatticePoint> a, std::span<const LatticePoint> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("Minkowski sum operands must be nonempty");
    MinkowskiSum out;
    out.matrix.reserve(a.size() * b.size());
    for (const auto& p : a)
        for (const auto& q : b) out.matrix.push_back(p + q);
    std::sort(out.matrix.begin(), out.matrix.end());
    out.matrix.erase(std::unique(out.matrix.begin(), out.matrix.end()), out.matrix.end());
    out.disjoint = out.matrix.size() == a.size() * b.size();
    normalize_translation(out.matrix);  // throws if it does not fit
    return out;
}

}  // namespace udg
