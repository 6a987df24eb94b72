#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "udg/canonical.hpp"

namespace udg {

struct GraphRecord {
    int vertex_count = 0;
    int edge_count = 0;
    std::uint64_t hash = 0;
    GraphMatrix matrix;

    friend bool operator==(const GraphRecord&, const GraphRecord&) = default;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

GraphRecord make_record(const CanonicalGraph& g);

/// Checks row count, box, strictly increasing point codes and the edge count.
/// With a table, also checks the hash.
void validate_record(const GraphRecord& r, const ZobristTable* table = nullptr);

// Text format, one record:
//   G <n> <m> <16 hex digit hash>
//   <n lines of four integers>
//   <blank line>
void write_record(std::ostream& os, const GraphRecord& r);
std::vector<GraphRecord> read_records(std::istream& is, const std::string& source = "<stream>");
void for_each_record(std::istream& is, const std::string& source, const std::function<void(GraphRecord&&)>& fn);
std::vector<GraphRecord> read_graph_file(const std::filesystem::path& path);

// Graph database sharded by vertex count into udg_<n>.txt. Appends are
// deduplicated by hash per shard, including records already on disk.
class GraphDatabase {
public:
    explicit GraphDatabase(std::filesystem::path dir, const ZobristTable* table = nullptr);
    ~GraphDatabase();
    GraphDatabase(const GraphDatabase&) = delete;
    GraphDatabase& operator=(const GraphDatabase&) = delete;

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path shard_path(int vertex_count) const;

    /// Validates, then appends unless the hash is already stored. Returns
    /// whether the record was written.
    bool append(const GraphRecord& r);
    /// Append for records whose invariants the caller already guarantees.
    bool append_trusted(std::span<const LatticePoint> matrix, std::uint64_t hash, int edges);
    void flush();

    std::size_t record_count() const;
    std::vector<int> vertex_counts() const;
    std::vector<GraphRecord> read_shard(int vertex_count);

private:
    struct Shard {
        std::unordered_set<std::uint64_t> hashes;
        std::unique_ptr<std::ofstream> out;
    };
    Shard& shard(int vertex_count);
    void write(Shard& s, int vertex_count, std::span<const LatticePoint> matrix, std::uint64_t hash, int edges);

    std::filesystem::path dir_;
    const ZobristTable* table_;
    std::map<int, Shard> shards_;
};

struct SummaryRow {
    int vertices = 0;
    int max_edges = 0;
    std::size_t iso_classes = 0;

    friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

/// Per vertex count: highest edge count and the number of isomorphism
/// classes among graphs attaining it. Reads every udg_<n>.txt in `dir`.
std::vector<SummaryRow> summarize(const std::filesystem::path& dir);
std::vector<SummaryRow> summarize(std::span<const GraphRecord> records);
void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows);

}  // namespace udg
