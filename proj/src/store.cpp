#include "udg/store.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "udg/genealogy.hpp"
#include "udg/isoclass.hpp"

namespace udg {

namespace fs = std::filesystem;

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

GraphRecord make_record(const CanonicalGraph& g) {
    return {static_cast<int>(g.matrix.size()), edge_count(g.matrix), g.hash, g.matrix};
}

void validate_record(const GraphRecord& r, const ZobristTable* table) {
    if (r.vertex_count < 1 || static_cast<std::size_t>(r.vertex_count) != r.matrix.size())
        throw ValidationError("vertex count does not match matrix rows");
    for (std::size_t i = 0; i < r.matrix.size(); ++i) {
        if (!in_box(r.matrix[i])) throw ValidationError("coefficient outside the canonical box");
        if (i > 0 && point_code(r.matrix[i - 1]) >= point_code(r.matrix[i]))
            throw ValidationError("rows are not strictly increasing by point code");
    }
    const int e = edge_count(r.matrix);
    if (e != r.edge_count)
        throw ValidationError("edge count " + std::to_string(r.edge_count) + " != recomputed " + std::to_string(e));
    if (table && zobrist_hash(r.matrix, *table) != r.hash) throw ValidationError("hash does not match rows");
}

namespace {

void write_rows(std::ostream& os, int n, int m, std::uint64_t hash, std::span<const LatticePoint> rows) {
    char head[64];
    std::snprintf(head, sizeof head, "G %d %d %016" PRIx64 "\n", n, m, hash);
    os << head;
    for (const auto& p : rows) os << p[0] << ' ' << p[1] << ' ' << p[2] << ' ' << p[3] << '\n';
    os << '\n';
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class T>
bool parse_num(std::string_view s, T& out, int base = 10) {
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out, base);
    return ec == std::errc{} && ptr == end;
}

bool is_blank(std::string_view s) { return split_ws(s).empty(); }

}  // namespace

void write_record(std::ostream& os, const GraphRecord& r) {
    write_rows(os, r.vertex_count, r.edge_count, r.hash, r.matrix);
}

void for_each_record(std::istream& is, const std::string& source, const std::function<void(GraphRecord&&)>& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        const auto tok = split_ws(line);
        GraphRecord r;
        if (tok.size() != 4 || tok[0] != "G") throw ParseError(source, lineno, "expected 'G <n> <m> <hash>'");
        if (!parse_num(tok[1], r.vertex_count) || r.vertex_count < 1)
            throw ParseError(source, lineno, "bad vertex count");
        if (!parse_num(tok[2], r.edge_count) || r.edge_count < 0) throw ParseError(source, lineno, "bad edge count");
        if (tok[3].size() != 16 || !parse_num(tok[3], r.hash, 16)) throw ParseError(source, lineno, "bad hash");
        r.matrix.reserve(static_cast<std::size_t>(r.vertex_count));
        for (int i = 0; i < r.vertex_count; ++i) {
            if (!std::getline(is, line)) throw ParseError(source, lineno + 1, "unexpected end of file in matrix");
            ++lineno;
            const auto row = split_ws(line);
            LatticePoint p;
            if (row.size() != 4) throw ParseError(source, lineno, "expected four integers");
            for (std::size_t k = 0; k < 4; ++k)
                if (!parse_num(row[k], p[k])) throw ParseError(source, lineno, "bad integer '" + std::string(row[k]) + "'");
            r.matrix.push_back(p);
        }
        if (std::getline(is, line)) {
            ++lineno;
            if (!is_blank(line)) throw ParseError(source, lineno, "expected blank line after matrix");
        }
        fn(std::move(r));
    }
}

std::vector<GraphRecord> read_records(std::istream& is, const std::string& source) {
    std::vector<GraphRecord> out;
    for_each_record(is, source, [&](GraphRecord&& r) { out.push_back(std::move(r)); });
    return out;
}

std::vector<GraphRecord> read_graph_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw StoreError("cannot open " + path.string());
    return read_records(in, path.string());
}

namespace {

std::map<int, fs::path> list_shards(const fs::path& dir) {
    std::map<int, fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.size() < 9 || !name.starts_with("udg_") || !name.ends_with(".txt")) continue;
        int n = 0;
        if (parse_num(std::string_view(name).substr(4, name.size() - 8), n) && n > 0) out[n] = entry.path();
    }
    return out;
}

}  // namespace

GraphDatabase::GraphDatabase(fs::path dir, const ZobristTable* table) : dir_(std::move(dir)), table_(table) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw StoreError("cannot create " + dir_.string() + ": " + ec.message());
    for (const auto& [n, path] : list_shards(dir_)) {
        std::ifstream in(path);
        if (!in) throw StoreError("cannot open " + path.string());
        auto& s = shards_[n];
        for_each_record(in, path.string(), [&](GraphRecord&& r) { s.hashes.insert(r.hash); });
    }
}

GraphDatabase::~GraphDatabase() {
    for (auto& [n, s] : shards_)
        if (s.out) s.out->flush();
}

fs::path GraphDatabase::shard_path(int vertex_count) const {
    return dir_ / ("udg_" + std::to_string(vertex_count) + ".txt");
}

GraphDatabase::Shard& GraphDatabase::shard(int vertex_count) {
    auto& s = shards_[vertex_count];
    if (!s.out) {
        const auto path = shard_path(vertex_count);
        s.out = std::make_unique<std::ofstream>(path, std::ios::app);
        if (!*s.out) throw StoreError("cannot open " + path.string() + " for append");
    }
    return s;
}

void GraphDatabase::write(Shard& s, int vertex_count, std::span<const LatticePoint> matrix, std::uint64_t hash,
                          int edges) {
    write_rows(*s.out, vertex_count, edges, hash, matrix);
    if (!*s.out) throw StoreError("write failed: " + shard_path(vertex_count).string());
    s.hashes.insert(hash);
}

bool GraphDatabase::append(const GraphRecord& r) {
    validate_record(r, table_);
    auto& s = shard(r.vertex_count);
    if (s.hashes.contains(r.hash)) return false;
    write(s, r.vertex_count, r.matrix, r.hash, r.edge_count);
    return true;
}

bool GraphDatabase::append_trusted(std::span<const LatticePoint> matrix, std::uint64_t hash, int edges) {
    const int n = static_cast<int>(matrix.size());
    auto& s = shard(n);
    if (s.hashes.contains(hash)) return false;
    write(s, n, matrix, hash, edges);
    return true;
}

void GraphDatabase::flush() {
    for (auto& [n, s] : shards_)
        if (s.out) {
            s.out->flush();
            if (!*s.out) throw StoreError("flush failed: " + shard_path(n).string());
        }
}

std::size_t GraphDatabase::record_count() const {
    std::size_t total = 0;
    for (const auto& [n, s] : shards_) total += s.hashes.size();
    return total;
}

std::vector<int> GraphDatabase::vertex_counts() const {
    std::vector<int> out;
    for (const auto& [n, s] : shards_)
        if (!s.hashes.empty()) out.push_back(n);
    return out;
}

std::vector<GraphRecord> GraphDatabase::read_shard(int vertex_count) {
    flush();
    std::ifstream in(shard_path(vertex_count));
    if (!in) return {};
    return read_records(in, shard_path(vertex_count).string());
}

std::vector<SummaryRow> summarize(std::span<const GraphRecord> records) {
    std::map<int, std::pair<int, std::vector<GraphMatrix>>> best;
    for (const auto& r : records) {
        auto [it, inserted] = best.try_emplace(r.vertex_count, r.edge_count, std::vector<GraphMatrix>{});
        auto& [edges, graphs] = it->second;
        if (r.edge_count > edges) {
            edges = r.edge_count;
            graphs.clear();
        }
        if (r.edge_count == edges) graphs.push_back(r.matrix);
    }
    std::vector<SummaryRow> rows;
    for (const auto& [n, entry] : best) rows.push_back({n, entry.first, count_iso_classes(entry.second)});
    return rows;
}

std::vector<SummaryRow> summarize(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw StoreError("not a database directory: " + dir.string());
    std::vector<SummaryRow> rows;
    for (const auto& [n, path] : list_shards(dir)) {
        std::ifstream in(path);
        if (!in) throw StoreError("cannot open " + path.string());
        std::vector<GraphRecord> top;
        int best = -1;
        for_each_record(in, path.string(), [&](GraphRecord&& r) {
            if (r.edge_count > best) {
                best = r.edge_count;
                top.clear();
            }
            if (r.edge_count == best) top.push_back(std::move(r));
        });
        const auto part = summarize(top);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    std::sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) { return a.vertices < b.vertices; });
    return rows;
}

void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows) {
    os << "V,E,I\n";
    for (const auto& r : rows) os << r.vertices << ',' << r.max_edges << ',' << r.iso_classes << '\n';
}

}  // namespace udg
