#include "udg/search.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "udg/store.hpp"

namespace udg {

namespace fs = std::filesystem;

GraphMatrix moser_spindle() {
    return {{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}};
}

GraphBatch slice(const GraphBatch& b, std::size_t begin, std::size_t end) {
    GraphBatch out(b.vertex_count());
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) out.push_back(b.graph(i));
    return out;
}

CanonicalBatch slice(const CanonicalBatch& b, std::size_t begin, std::size_t end) {
    CanonicalBatch out(b.vertex_count());
    out.graphs.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) out.push_back(b.graphs.graph(i), b.hashes[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoint helpers

namespace {

constexpr char kMagic[4] = {'U', 'D', 'G', 'V'};

void put_u32(std::ostream& os, std::uint32_t v) {
    const char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
    os.write(b, 4);
}

std::uint32_t get_u32(std::istream& is, const fs::path& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw StoreError("truncated checkpoint: " + path.string());
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

std::ofstream open_checkpoint(const fs::path& path, std::uint32_t version) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw StoreError("cannot write " + path.string());
    os.write(kMagic, 4);
    put_u32(os, version);
    return os;
}

std::ifstream read_checkpoint(const fs::path& path, std::uint32_t version) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw StoreError("cannot open " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw StoreError("bad magic in " + path.string());
    if (get_u32(is, path) != version) throw StoreError("unsupported checkpoint version in " + path.string());
    return is;
}

}  // namespace

void VisitationStore::FreeDeleter::operator()(std::uint32_t* p) const { std::free(p); }

VisitationStore::VisitationStore(int head_bits) : head_bits_(head_bits) {
    if (head_bits < 1 || head_bits > 32) throw std::invalid_argument("head_bits must be in [1, 32]");
    clear();
}

void VisitationStore::clear() {
    // calloc keeps untouched pages lazily zeroed.
    counts_.reset(static_cast<std::uint32_t*>(std::calloc(size(), sizeof(std::uint32_t))));
    if (!counts_) throw std::bad_alloc();
}

void VisitationStore::increment(std::uint64_t hash) {
    auto& c = counts_[index(hash)];
    if (c != UINT32_MAX) ++c;
}

void VisitationStore::save(const fs::path& path) const {
    auto os = open_checkpoint(path, kVersion);
    put_u32(os, static_cast<std::uint32_t>(head_bits_));
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(counts_.get()), static_cast<std::streamsize>(size() * 4));
    } else {
        for (std::size_t i = 0; i < size(); ++i) put_u32(os, counts_[i]);
    }
    if (!os) throw StoreError("write failed: " + path.string());
}

VisitationStore VisitationStore::load(const fs::path& path) {
    auto is = read_checkpoint(path, kVersion);
    VisitationStore v(static_cast<int>(get_u32(is, path)));
    if constexpr (std::endian::native == std::endian::little) {
        if (!is.read(reinterpret_cast<char*>(v.counts_.get()), static_cast<std::streamsize>(v.size() * 4)))
            throw StoreError("truncated checkpoint: " + path.string());
    } else {
        for (std::size_t i = 0; i < v.size(); ++i) v.counts_[i] = get_u32(is, path);
    }
    return v;
}

std::optional<int> BestTable::get(int vertex_count) const {
    auto it = best_.find(vertex_count);
    if (it == best_.end()) return std::nullopt;
    return it->second;
}

bool BestTable::update(int vertex_count, int edges) {
    auto [it, inserted] = best_.try_emplace(vertex_count, edges);
    if (inserted) return true;
    if (edges <= it->second) return false;
    it->second = edges;
    return true;
}

void BestTable::save(const fs::path& path) const {
    auto os = open_checkpoint(path, kVersion);
    put_u32(os, static_cast<std::uint32_t>(best_.size()));
    for (const auto& [n, e] : best_) {
        put_u32(os, static_cast<std::uint32_t>(n));
        put_u32(os, static_cast<std::uint32_t>(e));
    }
    if (!os) throw StoreError("write failed: " + path.string());
}

BestTable BestTable::load(const fs::path& path) {
    auto is = read_checkpoint(path, kVersion);
    BestTable t;
    const auto count = get_u32(is, path);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto n = static_cast<int>(get_u32(is, path));
        t.best_[n] = static_cast<int>(get_u32(is, path));
    }
    return t;
}

int SearchConfig::width(int vertex_count) const {
    auto it = width_overrides.find(vertex_count);
    return it == width_overrides.end() ? beam_width : it->second;
}

void SearchConfig::validate() const {
    if (beam_width < 1) throw std::invalid_argument("beam width must be >= 1");
    for (const auto& [n, w] : width_overrides)
        if (w < 1) throw std::invalid_argument("beam width for " + std::to_string(n) + " vertices must be >= 1");
    if (max_vertices < 7) throw std::invalid_argument("max_vertices must be >= 7");
    if (num_runs < 0) throw std::invalid_argument("runs must be >= 0");
    if (chunk_limit_base < 1) throw std::invalid_argument("chunk limit must be >= 1");
    if (start_graph.empty()) throw std::invalid_argument("start graph is empty");
    if (!has_distinct_rows(start_graph)) throw std::invalid_argument("start graph has repeated vertices");
    if (!is_connected(start_graph)) throw std::invalid_argument("start graph is not connected");
}

// ---------------------------------------------------------------------------
// Beam

std::int32_t Beam::max_edges() const { return *std::max_element(edges.begin(), edges.end()); }

bool Beam::any_new_leader() const {
    return std::any_of(leaders.begin(), leaders.end(), [&](std::uint32_t i) { return visits[i] == 0; });
}

void Beam::push_back(std::span<const LatticePoint> g, std::uint64_t hash, std::int32_t e, std::int64_t s,
                     std::uint32_t v) {
    graphs.push_back(g, hash);
    edges.push_back(e);
    scores.push_back(s);
    visits.push_back(v);
}

void Beam::recompute_leaders() {
    leaders.clear();
    if (empty()) return;
    const auto best = *std::max_element(scores.begin(), scores.end());
    for (std::uint32_t i = 0; i < size(); ++i)
        if (scores[i] == best) leaders.push_back(i);
}

namespace {

bool ranks_before(std::int64_t sa, std::uint64_t ha, std::int64_t sb, std::uint64_t hb) {
    return sa != sb ? sa > sb : ha < hb;
}

Beam reorder(const Beam& b, std::span<const std::uint32_t> idx) {
    Beam out;
    out.graphs = CanonicalBatch(b.graphs.vertex_count());
    out.graphs.graphs.reserve(idx.size());
    for (auto i : idx) out.push_back(b.graphs.graphs.graph(i), b.graphs.hashes[i], b.edges[i], b.scores[i], b.visits[i]);
    out.recompute_leaders();
    return out;
}

}  // namespace

void Beam::sort() {
    std::vector<std::uint32_t> idx(size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        return ranks_before(scores[a], graphs.hashes[a], scores[b], graphs.hashes[b]);
    });
    *this = reorder(*this, idx);
}

Beam prune(Beam beam, int width) {
    if (width < 1) throw std::invalid_argument("beam width must be >= 1");
    beam.sort();
    if (beam.size() <= static_cast<std::size_t>(width)) return beam;
    std::vector<std::uint32_t> idx(static_cast<std::size_t>(width));
    std::iota(idx.begin(), idx.end(), 0u);
    return reorder(beam, idx);
}

Beam merge_by_edge_threshold(const std::vector<const Beam*>& parts, int width) {
    Beam all;
    std::unordered_set<std::uint64_t> seen;
    for (const Beam* p : parts) {
        if (!p || p->empty()) continue;
        if (all.empty() && all.graphs.vertex_count() == 0) all.graphs = CanonicalBatch(p->graphs.vertex_count());
        for (std::size_t i = 0; i < p->size(); ++i)
            if (seen.insert(p->graphs.hashes[i]).second)
                all.push_back(p->graphs.graphs.graph(i), p->graphs.hashes[i], p->edges[i], p->scores[i],
                              p->visits[i]);
    }
    if (all.empty()) return all;
    std::vector<std::int32_t> sorted = all.edges;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(width), sorted.size());
    const std::int32_t threshold = sorted[k - 1];
    std::vector<std::uint32_t> keep;
    for (std::uint32_t i = 0; i < all.size(); ++i)
        if (all.edges[i] >= threshold) keep.push_back(i);
    Beam out = reorder(all, keep);
    out.sort();
    return out;
}

// ---------------------------------------------------------------------------
// BeamSearch

BeamSearch::BeamSearch(SearchConfig config, VisitationStore& visits, BestTable& best, GraphDatabase* db,
                       std::ostream* log)
    : config_(std::move(config)),
      table_(config_.zobrist_seed),
      genealogy_(table_),
      visits_(&visits),
      best_(&best),
      db_(db),
      log_(log) {
    config_.validate();
}

void BeamSearch::commit(Beam& beam) {
    const int n = beam.vertex_count();
    for (std::size_t i = 0; i < beam.size(); ++i) {
        visits_->increment(beam.graphs.hashes[i]);
        if (db_) db_->append_trusted(beam.graphs.graphs.graph(i), beam.graphs.hashes[i], beam.edges[i]);
    }
    if (beam.empty()) return;
    const int e = beam.max_edges();
    if (best_->update(n, e) && log_) *log_ << "run " << run_index_ << ": best[" << n << "] = " << e << '\n';
}

Beam BeamSearch::score_and_commit(const GenealogyResult& r, int width) {
    Beam b;
    b.graphs = r.graphs;
    b.edges = r.edges;
    b.visits.resize(r.size());
    b.scores.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        b.visits[i] = visits_->get(r.graphs.hashes[i]);
        b.scores[i] = score(r.edges[i], b.visits[i]);
    }
    b = prune(std::move(b), width);
    commit(b);
    return b;
}

Beam BeamSearch::start_beam() {
    auto c = canonize(config_.start_graph, table_);
    if (!c) throw std::invalid_argument("start graph does not fit the coefficient box");
    GenealogyResult r;
    r.graphs = CanonicalBatch(c->matrix.size());
    r.graphs.push_back(c->matrix, c->hash);
    r.edges.push_back(edge_count(c->matrix));
    return score_and_commit(r, config_.width(static_cast<int>(c->matrix.size())));
}

Beam BeamSearch::children_beam(const Beam& beam, int width) {
    const std::size_t limit = chunk_limit_for(config_.chunk_limit_base, beam.graphs.vertex_count());
    std::vector<ChildCandidate> all;
    for (std::size_t begin = 0; begin < beam.size(); begin += limit) {
        const std::size_t end = std::min(beam.size(), begin + limit);
        auto part = genealogy_.child_candidates(slice(beam.graphs, begin, end), &stats_.dropped_oob);
        for (auto& c : part) c.parent += static_cast<std::uint32_t>(begin);
        all.insert(all.end(), part.begin(), part.end());
    }
    stats_.candidates += all.size();
    dedup_by_hash(all);

    std::vector<std::uint32_t> visits(all.size());
    std::vector<std::int64_t> scores(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        visits[i] = visits_->get(all[i].hash);
        scores[i] = score(all[i].edges, visits[i]);
    }
    std::vector<std::uint32_t> idx(all.size());
    std::iota(idx.begin(), idx.end(), 0u);
    auto before = [&](std::uint32_t a, std::uint32_t b) {
        return ranks_before(scores[a], all[a].hash, scores[b], all[b].hash);
    };
    const std::size_t keep = std::min(idx.size(), static_cast<std::size_t>(width));
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(), before);

    Beam out;
    out.graphs = CanonicalBatch(beam.graphs.vertex_count() + 1);
    out.graphs.graphs.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) {
        const auto i = idx[k];
        const auto child = genealogy_.materialize(beam.graphs, all[i]);
        out.push_back(child.matrix, child.hash, all[i].edges, scores[i], visits[i]);
    }
    out.recompute_leaders();
    commit(out);
    return out;
}

Beam BeamSearch::forward_step(const Beam& beam) {
    if (beam.empty()) throw std::invalid_argument("forward step from an empty beam");
    ++stats_.forward_steps;
    Beam out = children_beam(beam, config_.width(beam.vertex_count() + 1));
    if (out.empty()) throw EmptyFrontier("no children at " + std::to_string(beam.vertex_count() + 1) + " vertices");
    return out;
}

Beam BeamSearch::parent_step(const Beam& beam) {
    const std::size_t limit = chunk_limit_for(config_.chunk_limit_base, beam.graphs.vertex_count());
    auto r = chunked_map(beam.graphs, [&](const CanonicalBatch& b) { return genealogy_.parents(b); }, limit);
    dedup_by_hash(r);
    stats_.dropped_oob += r.dropped_oob;
    stats_.disconnected += r.disconnected;
    if (r.size() == 0) return Beam{};
    return score_and_commit(r, config_.width(beam.vertex_count() - 1));
}

bool BeamSearch::should_backtrack(const Beam& beam) const {
    const auto t = best(beam.vertex_count());
    for (std::size_t i = 0; i < beam.size(); ++i)
        if (beam.visits[i] == 0 && t && beam.edges[i] >= *t) return true;
    return false;
}

namespace {

struct Frame {
    std::vector<Beam> levels;  // levels[0] is the entry beam, then successive parent beams
    std::size_t level = 0;     // levels[level]'s children merge into levels[level - 1]
    Beam pending;              // children awaiting a recursive result
    bool awaiting = false;
};

}  // namespace

Beam BeamSearch::backward(Beam beam) {
    ++stats_.backward_calls;

    auto ascend = [this](Beam entry) {
        Frame f;
        f.levels.push_back(std::move(entry));
        while (f.levels.back().vertex_count() - 1 > 4) {
            Beam parents = parent_step(f.levels.back());
            if (parents.empty()) break;
            const bool below_best = parents.max_score() < *best(parents.vertex_count());
            const bool all_seen = !parents.any_new_leader();
            f.levels.push_back(std::move(parents));
            if (below_best || all_seen) break;
        }
        f.level = f.levels.size() - 1;
        return f;
    };

    std::vector<Frame> stack;
    stack.push_back(ascend(std::move(beam)));
    stats_.max_depth = std::max<std::size_t>(stats_.max_depth, 1);
    Beam result;

    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.awaiting) {
            Beam& dst = f.levels[f.level - 1];
            dst = merge_by_edge_threshold({&dst, &f.pending, &result}, config_.width(dst.vertex_count()));
            f.pending = Beam{};
            f.awaiting = false;
            --f.level;
        }
        bool descended = false;
        while (f.level >= 1) {
            Beam& dst = f.levels[f.level - 1];
            const Beam& src = f.levels[f.level];
            Beam kids = children_beam(src, config_.width(src.vertex_count() + 1));
            if (kids.empty() || kids.vertex_count() <= 6) {
                --f.level;
                continue;
            }
            const bool check = kids.max_score() > dst.max_score() ||
                               (kids.max_score() == *best(kids.vertex_count()) && kids.any_new_leader());
            if (check && stack.size() < static_cast<std::size_t>(config_.max_backward_depth)) {
                ++stats_.backward_recursions;
                f.pending = std::move(kids);
                f.awaiting = true;
                Frame next = ascend(f.pending);
                stack.push_back(std::move(next));  // invalidates f
                stats_.max_depth = std::max(stats_.max_depth, stack.size());
                descended = true;
                break;
            }
            if (check) ++stats_.recursion_capped;
            dst = merge_by_edge_threshold({&dst, &kids}, config_.width(dst.vertex_count()));
            --f.level;
        }
        if (descended) continue;
        result = std::move(stack.back().levels.front());
        result.recompute_leaders();
        stack.pop_back();
    }
    return result;
}

void BeamSearch::run_once() {
    ++run_index_;
    Beam start = start_beam();
    for (Beam p = start; p.vertex_count() > 1;) {
        p = parent_step(p);
        if (p.empty()) break;
    }
    Beam beam = std::move(start);
    while (beam.vertex_count() < config_.max_vertices) {
        Beam next;
        try {
            next = forward_step(beam);
        } catch (const EmptyFrontier& e) {
            if (log_) *log_ << "run " << run_index_ << ": " << e.what() << '\n';
            break;
        }
        if (config_.backtracking && should_backtrack(next)) next = backward(std::move(next));
        beam = std::move(next);
    }
    if (db_) db_->flush();
    if (log_) {
        *log_ << "run " << run_index_ << " done:";
        for (const auto& [n, e] : best_->entries()) *log_ << ' ' << n << ':' << e;
        *log_ << '\n';
    }
}

void BeamSearch::run() {
    for (int r = 0; r < config_.num_runs; ++r) run_once();
}

// ---------------------------------------------------------------------------
// Config file

ConfigFile read_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw StoreError("cannot open config " + path.string());
    ConfigFile cfg;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(path.string(), lineno, "expected 'key = value'");
        cfg.values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

namespace {

template <class T>
T parse_value(const std::string& key, const std::string& v) {
    T out{};
    int base = 10;
    std::string_view s = v;
    if constexpr (std::is_unsigned_v<T>) {
        if (s.starts_with("0x") || s.starts_with("0X")) {
            s.remove_prefix(2);
            base = 16;
        }
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, base);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
    return out;
}

}  // namespace

void apply_config(const ConfigFile& file, SearchConfig& config, const fs::path& base_dir) {
    for (const auto& [key, value] : file.values) {
        if (key == "beam_width") {
            config.beam_width = parse_value<int>(key, value);
        } else if (key.starts_with("beam_width.")) {
            config.width_overrides[parse_value<int>(key, key.substr(11))] = parse_value<int>(key, value);
        } else if (key == "max_vertices") {
            config.max_vertices = parse_value<int>(key, value);
        } else if (key == "runs") {
            config.num_runs = parse_value<int>(key, value);
        } else if (key == "seed") {
            config.zobrist_seed = parse_value<std::uint64_t>(key, value);
        } else if (key == "chunk_limit") {
            config.chunk_limit_base = parse_value<std::size_t>(key, value);
        } else if (key == "backtracking") {
            if (value != "true" && value != "false") throw std::invalid_argument("backtracking must be true or false");
            config.backtracking = value == "true";
        } else if (key == "start") {
            const fs::path p = fs::path(value).is_absolute() || base_dir.empty() ? fs::path(value) : base_dir / value;
            const auto records = read_graph_file(p);
            if (records.empty()) throw std::invalid_argument("start file has no graph: " + p.string());
            config.start_graph = records.front().matrix;
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
}

}  // namespace udg
