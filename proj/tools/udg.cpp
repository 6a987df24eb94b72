// udg: command-line driver for the unit-distance graph search.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "udg/canonical.hpp"
#include "udg/genealogy.hpp"
#include "udg/isoclass.hpp"
#include "udg/render.hpp"
#include "udg/search.hpp"
#include "udg/store.hpp"

namespace fs = std::filesystem;
using namespace udg;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

GraphMatrix read_first_graph(const fs::path& path) {
    auto records = read_graph_file(path);
    if (records.empty()) throw ParseError(path.string(), 1, "no graph record");
    if (!has_distinct_rows(records.front().matrix)) throw ParseError(path.string(), 1, "repeated vertex");
    return records.front().matrix;
}

CanonicalGraph canonize_or_throw(const GraphMatrix& g, const ZobristTable& table) {
    auto c = canonize(g, table);
    if (!c) throw OutOfBoundsError("graph does not fit the coefficient box in any orientation");
    return *c;
}

void print_batch(const GenealogyResult& r) {
    for (std::size_t i = 0; i < r.size(); ++i)
        write_record(std::cout, {static_cast<int>(r.graphs.vertex_count()), r.edges[i], r.graphs.hashes[i],
                                 r.graphs.at(i).matrix});
}

struct SearchArgs {
    int max_vertices = 0;
    int beam_width = 0;
    int runs = 0;
    std::uint64_t seed = 0;
    std::size_t chunk_limit = 0;
    std::string out;
    std::string config;
    std::string start;
    std::string visits;
    bool no_backtrack = false;
};

int cmd_search(const SearchArgs& a, const CLI::App& sub) {
    SearchConfig config;
    if (!a.config.empty()) {
        const fs::path cfg(a.config);
        apply_config(read_config_file(cfg), config, cfg.parent_path());
    }
    if (sub.count("--max-vertices")) config.max_vertices = a.max_vertices;
    if (sub.count("--beam-width")) config.beam_width = a.beam_width;
    if (sub.count("--runs")) config.num_runs = a.runs;
    if (sub.count("--seed")) config.zobrist_seed = a.seed;
    if (sub.count("--chunk-limit")) config.chunk_limit_base = a.chunk_limit;
    if (!a.start.empty()) config.start_graph = read_first_graph(a.start);
    if (a.no_backtrack) config.backtracking = false;
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    std::string out = a.out;
    if (out.empty())
        if (const char* env = std::getenv("UDG_OUT_DIR")) out = env;
    if (out.empty()) throw UsageError("--out is required (or set UDG_OUT_DIR)");
    const fs::path dir(out);

    const ZobristTable table(config.zobrist_seed);
    GraphDatabase db(dir, &table);
    const fs::path best_path = dir / "best.bin";
    BestTable best = fs::exists(best_path) ? BestTable::load(best_path) : BestTable{};
    VisitationStore visits = !a.visits.empty() && fs::exists(a.visits) ? VisitationStore::load(a.visits)
                                                                        : VisitationStore{};

    std::ofstream log(dir / "best_log.txt", std::ios::app);
    if (!log) throw StoreError("cannot open " + (dir / "best_log.txt").string());

    const auto t0 = std::chrono::steady_clock::now();
    BeamSearch search(config, visits, best, &db, &log);
    search.run();
    db.flush();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    best.save(best_path);
    if (!a.visits.empty()) visits.save(a.visits);
    const auto rows = summarize(dir);
    std::ofstream csv(dir / "summary.csv", std::ios::trunc);
    write_summary_csv(csv, rows);
    if (!csv) throw StoreError("cannot write " + (dir / "summary.csv").string());

    const auto& st = search.stats();
    std::cerr << "search: " << config.num_runs << " run(s), " << db.record_count() << " graphs stored, "
              << st.forward_steps << " forward steps, " << st.backward_calls << " backward calls, "
              << st.backward_recursions << " recursions, " << st.dropped_oob << " out-of-box, " << secs << " s\n";
    write_summary_csv(std::cout, rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dense unit-distance graph search on the Moser lattice"};
    app.require_subcommand(1);

    // search
    SearchArgs sa;
    auto* search = app.add_subcommand("search", "Run the diverse backtracking beam search.\n"
                                                "Precedence: defaults < --config file < flags.");
    search->add_option("--max-vertices", sa.max_vertices, "Largest vertex count to reach (>= 7)");
    search->add_option("--beam-width", sa.beam_width, "Beam width for every vertex count");
    search->add_option("--runs", sa.runs, "Number of diversity runs");
    search->add_option("--seed", sa.seed, "Zobrist key seed");
    search->add_option("--out", sa.out, "Database directory (default: $UDG_OUT_DIR)");
    search->add_option("--chunk-limit", sa.chunk_limit, "Graph rows per batch chunk, divided by vertex count");
    search->add_option("--config", sa.config, "key = value config file")->check(CLI::ExistingFile);
    search->add_option("--start", sa.start, "Start graph file (default: Moser spindle)")->check(CLI::ExistingFile);
    search->add_option("--visits", sa.visits, "Visitation checkpoint to resume from and save to");
    search->add_flag("--no-backtrack", sa.no_backtrack, "Forward steps only");

    // render
    std::string render_in, render_out;
    std::size_t render_index = 0;
    RenderSpec spec;
    auto* render = app.add_subcommand("render", "Render a graph record as SVG");
    render->add_option("graph", render_in, "Graph file")->required();
    render->add_option("-o,--out", render_out, "SVG output (default: stdout)");
    render->add_option("--index", render_index, "Record index within the file");
    render->add_option("--scale", spec.scale, "Pixels per unit distance");
    render->add_option("--radius", spec.vertex_radius, "Vertex radius in pixels");
    render->add_option("--stroke", spec.stroke_width, "Edge stroke width");
    render->add_option("--margin", spec.margin, "Margin in pixels");

    // stats
    std::string stats_dir;
    auto* stats = app.add_subcommand("stats", "Print V,E,I summary of a database");
    stats->add_option("dir", stats_dir, "Database directory")->required();

    // minkowski
    std::string mk_a, mk_b;
    std::uint64_t seed = ZobristTable::kDefaultSeed;
    auto* mink = app.add_subcommand("minkowski", "Canonized Minkowski sum of two graphs");
    mink->add_option("a", mk_a, "First graph file")->required();
    mink->add_option("b", mk_b, "Second graph file")->required();
    mink->add_option("--seed", seed, "Zobrist key seed");

    // canon / children / parents
    std::string graph_in;
    auto* canon = app.add_subcommand("canon", "Canonize every graph in a file");
    canon->add_option("graph", graph_in, "Graph file")->required();
    canon->add_option("--seed", seed, "Zobrist key seed");
    auto* kids = app.add_subcommand("children", "Canonical children of the first graph in a file");
    kids->add_option("graph", graph_in, "Graph file")->required();
    kids->add_option("--seed", seed, "Zobrist key seed");
    auto* pars = app.add_subcommand("parents", "Canonical connected parents of the first graph in a file");
    pars->add_option("graph", graph_in, "Graph file")->required();
    pars->add_option("--seed", seed, "Zobrist key seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*search) return cmd_search(sa, *search);

        if (*render) {
            auto records = read_graph_file(render_in);
            if (render_index >= records.size()) throw UsageError("--index out of range");
            const auto svg = render_svg(records[render_index].matrix, spec);
            if (render_out.empty()) {
                std::cout << svg;
            } else {
                std::ofstream os(render_out);
                os << svg;
                if (!os) throw StoreError("cannot write " + render_out);
            }
            return 0;
        }

        if (*stats) {
            const auto rows = summarize(stats_dir);
            write_summary_csv(std::cout, rows);
            return 0;
        }

        const ZobristTable table(seed);
        if (*mink) {
            const auto sum = minkowski_sum(read_first_graph(mk_a), read_first_graph(mk_b));
            write_record(std::cout, make_record(canonize_or_throw(sum.matrix, table)));
            std::cout << "disjoint: " << (sum.disjoint ? "yes" : "no") << '\n';
            return 0;
        }
        if (*canon) {
            for (const auto& r : read_graph_file(graph_in)) {
                if (!has_distinct_rows(r.matrix)) throw ParseError(graph_in, 1, "repeated vertex");
                write_record(std::cout, make_record(canonize_or_throw(r.matrix, table)));
            }
            return 0;
        }
        if (*kids || *pars) {
            const auto c = canonize_or_throw(read_first_graph(graph_in), table);
            CanonicalBatch batch(c.matrix.size());
            batch.push_back(c.matrix, c.hash);
            if (*pars && c.matrix.size() < 2) throw UsageError("parents need at least two vertices");
            print_batch(*kids ? children(batch, table) : parents(batch, table));
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
