#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "udg/canonical.hpp"
#include "udg/genealogy.hpp"

namespace udg {

class GraphDatabase;

/// The 7-vertex, 11-edge Moser spindle in lattice coordinates.
GraphMatrix moser_spindle();

// ---------------------------------------------------------------------------
// Chunking

inline std::size_t chunk_limit_for(std::size_t base, std::size_t vertex_count) {
    return std::max<std::size_t>(1, base / std::max<std::size_t>(1, vertex_count));
}

GraphBatch slice(const GraphBatch& b, std::size_t begin, std::size_t end);
CanonicalBatch slice(const CanonicalBatch& b, std::size_t begin, std::size_t end);

/// Applies `op` to consecutive sub-batches of at most `limit` graphs and
/// concatenates the results with `Result::append`.
template <class Batch, class Op>
auto chunked_map(const Batch& batch, Op&& op, std::size_t limit) -> decltype(op(batch)) {
    if (limit == 0) throw std::invalid_argument("chunk limit must be positive");
    if (batch.size() <= limit) return op(batch);
    decltype(op(batch)) out = op(slice(batch, 0, limit));
    for (std::size_t begin = limit; begin < batch.size(); begin += limit)
        out.append(op(slice(batch, begin, std::min(batch.size(), begin + limit))));
    return out;
}

// ---------------------------------------------------------------------------
// Search state

/// Saturating 32-bit visitation counters indexed by the top `head_bits` of a hash.
class VisitationStore {
public:
    static constexpr int kDefaultHeadBits = 28;
    static constexpr std::uint32_t kVersion = 1;

    explicit VisitationStore(int head_bits = kDefaultHeadBits);

    int head_bits() const { return head_bits_; }
    std::size_t size() const { return std::size_t{1} << head_bits_; }
    std::size_t index(std::uint64_t hash) const { return static_cast<std::size_t>(hash >> (64 - head_bits_)); }
    std::uint32_t get(std::uint64_t hash) const { return counts_[index(hash)]; }
    void increment(std::uint64_t hash);
    void clear();

    /// "UDGV", u32 version, u32 head_bits, then the raw counters (little-endian).
    void save(const std::filesystem::path& path) const;
    static VisitationStore load(const std::filesystem::path& path);

private:
    struct FreeDeleter {
        void operator()(std::uint32_t* p) const;
    };
    int head_bits_;
    std::unique_ptr<std::uint32_t[], FreeDeleter> counts_;
};

/// Highest edge count seen per vertex count. Entries only ever increase.
class BestTable {
public:
    static constexpr std::uint32_t kVersion = 1;

    std::optional<int> get(int vertex_count) const;
    /// Returns true if the entry improved.
    bool update(int vertex_count, int edges);
    const std::map<int, int>& entries() const { return best_; }

    /// "UDGV", u32 version, u32 entry count, then (u32 vertices, u32 edges) pairs.
    void save(const std::filesystem::path& path) const;
    static BestTable load(const std::filesystem::path& path);

    friend bool operator==(const BestTable&, const BestTable&) = default;

private:
    std::map<int, int> best_;
};

struct SearchConfig {
    int beam_width = 100;
    std::map<int, int> width_overrides;  // vertex count -> width
    int max_vertices = 30;
    int num_runs = 1;
    std::size_t chunk_limit_base = 1 << 16;
    std::uint64_t zobrist_seed = ZobristTable::kDefaultSeed;
    GraphMatrix start_graph = moser_spindle();
    bool backtracking = true;
    int max_backward_depth = 64;

    int width(int vertex_count) const;
    void validate() const;
};

// ---------------------------------------------------------------------------
// Beam

inline std::int64_t score(std::int64_t edges, std::int64_t visits) { return edges - visits; }

// A same-size batch of canonical graphs. `visits` holds each graph's counter
// as read when it was scored, before the increment for being kept.
struct Beam {
    CanonicalBatch graphs;
    std::vector<std::int32_t> edges;
    std::vector<std::int64_t> scores;
    std::vector<std::uint32_t> visits;
    std::vector<std::uint32_t> leaders;

    std::size_t size() const { return graphs.size(); }
    bool empty() const { return graphs.empty(); }
    int vertex_count() const { return static_cast<int>(graphs.vertex_count()); }
    std::int64_t max_score() const { return scores[leaders.front()]; }
    std::int32_t max_edges() const;
    bool any_new_leader() const;

    void push_back(std::span<const LatticePoint> g, std::uint64_t hash, std::int32_t e, std::int64_t s,
                   std::uint32_t v);
    /// Orders by score descending, then hash ascending, and recomputes leaders.
    void sort();
    void recompute_leaders();
};

/// Keeps the `width` highest-scoring graphs (ties by smaller hash).
Beam prune(Beam beam, int width);

/// Union of the beams (first occurrence of a hash wins), keeping every graph
/// whose edge count reaches the `width`-th largest edge count.
Beam merge_by_edge_threshold(const std::vector<const Beam*>& parts, int width);

class EmptyFrontier : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SearchStats {
    std::size_t forward_steps = 0;
    std::size_t backward_calls = 0;
    std::size_t backward_recursions = 0;
    std::size_t recursion_capped = 0;
    std::size_t max_depth = 0;
    std::size_t dropped_oob = 0;
    std::size_t disconnected = 0;
    std::size_t candidates = 0;
};

class BeamSearch {
public:
    BeamSearch(SearchConfig config, VisitationStore& visits, BestTable& best, GraphDatabase* db = nullptr,
               std::ostream* log = nullptr);

    const SearchConfig& config() const { return config_; }
    const ZobristTable& table() const { return table_; }
    const SearchStats& stats() const { return stats_; }

    /// Canonical start graph as a committed one-graph beam.
    Beam start_beam();
    /// Children, scored, pruned to the next width and committed.
    /// Throws EmptyFrontier when there are no children.
    Beam forward_step(const Beam& beam);
    /// Parents, scored, pruned and committed.
    Beam parent_step(const Beam& beam);
    /// Multi-level backtracking from a freshly pruned beam.
    Beam backward(Beam beam);

    void run_once();
    void run();

private:
    Beam score_and_commit(const GenealogyResult& r, int width);
    Beam children_beam(const Beam& beam, int width);
    void commit(Beam& beam);
    bool should_backtrack(const Beam& beam) const;
    std::optional<int> best(int n) const { return best_->get(n); }

    SearchConfig config_;
    ZobristTable table_;
    Genealogy genealogy_;
    VisitationStore* visits_;
    BestTable* best_;
    GraphDatabase* db_;
    std::ostream* log_;
    SearchStats stats_;
    int run_index_ = 0;
};

// ---------------------------------------------------------------------------
// Config file: "key = value" lines, '#' comments. Keys: beam_width,
// max_vertices, runs, seed, chunk_limit, start, backtracking and
// beam_width.<n> for per-size widths. `start` names a graph file.

struct ConfigFile {
    std::map<std::string, std::string> values;
};

ConfigFile read_config_file(const std::filesystem::path& path);
/// Applies recognized keys to `config`; throws std::invalid_argument on unknown keys or bad values.
void apply_config(const ConfigFile& file, SearchConfig& config, const std::filesystem::path& base_dir = {});

}  // namespace udg
