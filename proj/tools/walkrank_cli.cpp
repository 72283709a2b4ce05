// walkrank command-line front end. Exit codes: 0 ok, 2 input format, 3 config, 4 state.

#include "walkrank/convergence.hpp"
#include "walkrank/delta_script.hpp"
#include "walkrank/errors.hpp"
#include "walkrank/generators.hpp"
#include "walkrank/graph_io.hpp"
#include "walkrank/ledger.hpp"
#include "walkrank/oracle.hpp"
#include "walkrank/sybil.hpp"
#include "walkrank/walks.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <set>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace walkrank;

namespace
{
    constexpr int exit_format = 2;
    constexpr int exit_config = 3;
    constexpr int exit_state = 4;

    class Stopwatch
    {
    public:
        double lap()
        {
            const auto now = std::chrono::steady_clock::now();
            const double s = std::chrono::duration<double>(now - m_start).count();
            m_start = now;
            return s;
        }

    private:
        std::chrono::steady_clock::time_point m_start = std::chrono::steady_clock::now();
    };

    std::ofstream open_out(const fs::path& path)
    {
        if (path.has_parent_path())
        {
            fs::create_directories(path.parent_path());
        }
        std::ofstream out(path, std::ios::binary);
        if (!out)
        {
            throw FormatError("cannot write " + path.string());
        }
        return out;
    }

    std::ifstream open_in(const fs::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
        {
            throw FormatError("cannot read " + path.string());
        }
        return in;
    }

    void write_manifest(const fs::path& path, json manifest)
    {
        auto out = open_out(path);
        out << manifest.dump(2) << '\n';
    }

    json report_json(const IngestReport& r)
    {
        return {
            {"blocks_read", r.blocks_read},
            {"blocks_counted", r.blocks_counted},
            {"blocks_skipped", r.blocks_skipped},
            {"skipped_self_pair", r.skipped_self_pair},
            {"skipped_malformed_tx", r.skipped_malformed_tx},
            {"skipped_duplicate", r.skipped_duplicate},
            {"skipped_malformed_row", r.skipped_malformed_row},
            {"nodes_created", r.nodes_created},
            {"edges_created", r.edges_created},
            {"edges_removed", r.edges_removed},
            {"edges_reversed", r.edges_reversed},
        };
    }

    RankVector oracle_ranks(const InteractionGraph& g, const std::string& oracle, double c, NodeId seed, json& info)
    {
        if (oracle == "exact")
        {
            return exact_solve(g, c, seed);
        }
        PowerIterConfig pc;
        pc.reset_probability = c;
        pc.seed = seed;
        PowerIterResult r = personalized_power_iteration(g, pc);
        info["power_iterations"] = r.iterations;
        info["power_converged"] = r.converged;
        return std::move(r.ranks);
    }

    std::vector<std::string> path_strings(const std::vector<fs::path>& paths)
    {
        std::vector<std::string> out;
        for (const auto& p : paths)
        {
            out.push_back(p.string());
        }
        return out;
    }

    // "A..B" or a single number.
    std::pair<std::size_t, std::size_t> parse_range(const std::string& text)
    {
        const auto dots = text.find("..");
        try
        {
            if (dots == std::string::npos)
            {
                const auto v = std::stoull(text);
                return {v, v};
            }
            return {std::stoull(text.substr(0, dots)), std::stoull(text.substr(dots + 2))};
        }
        catch (const std::logic_error&)
        {
            throw ConfigError("bad range `" + text + "` (expected A..B)");
        }
    }

    // ---- ingest ----
    struct IngestArgs
    {
        fs::path input;
        std::string format = "sqlite";
        fs::path out;
    };

    void cmd_ingest(const IngestArgs& a)
    {
        Stopwatch clock;
        const BlockStream stream = read_blocks(a.input, parse_ledger_format(a.format));
        const double t_read = clock.lap();
        const FlattenResult result = flatten(stream);
        const double t_flatten = clock.lap();
        save_graph(a.out, result.graph);
        const double t_write = clock.lap();

        std::cout << "ingested " << result.report.blocks_counted << " of " << result.report.blocks_read
                  << " blocks into " << result.graph.node_count() << " nodes, " << result.graph.edge_count()
                  << " edges\n";
        write_manifest(
            a.out.string() + ".manifest.json",
            {
                {"command", "ingest"},
                {"config", {{"input", a.input.string()}, {"format", a.format}, {"out", a.out.string()}}},
                {"graph_version", result.graph.version()},
                {"nodes", result.graph.node_count()},
                {"edges", result.graph.edge_count()},
                {"report", report_json(result.report)},
                {"timings_s", {{"read", t_read}, {"flatten", t_flatten}, {"write", t_write}}},
                {"outputs", {a.out.string(), node_list_path(a.out).string()}},
            }
        );
    }

    // ---- rank ----
    struct RankArgs
    {
        fs::path graph;
        std::string seed_node;
        std::size_t walks = 300;
        double reset = 0.3;
        std::uint64_t rng_seed = 0;
        std::string oracle = "none";
        fs::path out;
    };

    void cmd_rank(const RankArgs& a)
    {
        Stopwatch clock;
        const InteractionGraph g = load_graph(a.graph);
        const double t_load = clock.lap();
        const WalkConfig wc{a.walks, a.reset, a.rng_seed, g.require(a.seed_node)};
        wc.validate();
        const WalkCorpus corpus = sample_corpus(g, wc);
        const double t_sample = clock.lap();
        const RankVector ranks = rank(corpus, g);
        const double t_rank = clock.lap();

        const fs::path ranking = a.out / "ranking.csv";
        const fs::path corpus_path = a.out / "corpus.txt";
        {
            auto out = open_out(ranking);
            write_rank_csv(out, ranks, g);
        }
        {
            auto out = open_out(corpus_path);
            write_corpus(out, corpus, g);
        }
        json timings = {{"load", t_load}, {"sample", t_sample}, {"rank", t_rank}};
        json manifest = {
            {"command", "rank"},
            {"config",
             {{"graph", a.graph.string()},
              {"seed_node", a.seed_node},
              {"walks", a.walks},
              {"reset", a.reset},
              {"oracle", a.oracle}}},
            {"rng_seeds", {a.rng_seed}},
            {"graph_version", g.version()},
            {"total_visits", corpus.total_visits()},
            {"outputs", {ranking.string(), corpus_path.string()}},
        };
        if (a.oracle != "none")
        {
            clock.lap();
            json info;
            const RankVector ref = oracle_ranks(g, a.oracle, a.reset, wc.seed, info);
            timings["oracle"] = clock.lap();
            info["l2"] = l2_distance(ranks, ref);
            info["linf"] = linf_distance(ranks, ref);
            manifest["errors"] = info;
            std::cout << "L2 " << info["l2"].get<double>() << "  Linf " << info["linf"].get<double>() << '\n';
        }
        manifest["timings_s"] = timings;
        write_manifest(a.out / "manifest.json", manifest);
        std::cout << "ranked " << g.node_count() << " nodes from " << a.seed_node << " -> " << ranking.string()
                  << '\n';
    }

    // ---- update ----
    struct UpdateArgs
    {
        fs::path graph;
        fs::path delta;
        fs::path corpus;
        fs::path out;
        bool verify = false;
        std::string oracle = "none";
    };

    void cmd_update(const UpdateArgs& a)
    {
        Stopwatch clock;
        InteractionGraph g = load_graph(a.graph);
        std::vector<DeltaOp> ops;
        {
            auto in = open_in(a.delta);
            ops = read_delta_ops(in);
        }
        WalkCorpus corpus;
        {
            auto in = open_in(a.corpus);
            corpus = read_corpus(in, g);
        }
        if (corpus.version() != g.version())
        {
            throw StateError(
                "stale corpus: version " + std::to_string(corpus.version()) + ", required corpus version "
                + std::to_string(g.version())
            );
        }
        const double t_load = clock.lap();

        std::size_t segments = 0;
        std::size_t deltas = 0;
        for (const DeltaOp& op : ops)
        {
            const auto d = apply_op(g, op);
            deltas += d.size();
            segments += apply_deltas(corpus, g, d);
        }
        const RankVector ranks = rank(corpus, g);
        const double t_update = clock.lap();

        const fs::path ranking = a.out / "ranking.csv";
        const fs::path corpus_path = a.out / "corpus.txt";
        const fs::path graph_path = a.out / "graph.csv";
        {
            auto out = open_out(ranking);
            write_rank_csv(out, ranks, g);
        }
        {
            auto out = open_out(corpus_path);
            write_corpus(out, corpus, g);
        }
        save_graph(graph_path, g);

        json timings = {{"load", t_load}, {"update", t_update}};
        json manifest = {
            {"command", "update"},
            {"config",
             {{"graph", a.graph.string()},
              {"delta", a.delta.string()},
              {"corpus", a.corpus.string()},
              {"verify", a.verify},
              {"oracle", a.oracle},
              {"walks", corpus.config().walks},
              {"reset", corpus.config().reset_probability},
              {"seed_node", g.display_label(corpus.config().seed)}}},
            {"rng_seeds", {corpus.config().rng_seed}},
            {"graph_version", g.version()},
            {"ops", ops.size()},
            {"graph_deltas", deltas},
            {"segments_recomputed", segments},
            {"outputs", {ranking.string(), corpus_path.string(), graph_path.string(), node_list_path(graph_path).string()}},
        };
        if (a.verify)
        {
            clock.lap();
            const WalkCorpus fresh = sample_corpus(g, corpus.config());
            const RankVector fresh_ranks = rank(fresh, g);
            timings["fresh"] = clock.lap();
            manifest["verify"] = {
                {"l2", l2_distance(ranks, fresh_ranks)},
                {"linf", linf_distance(ranks, fresh_ranks)},
            };
        }
        if (a.oracle != "none")
        {
            clock.lap();
            json info;
            const RankVector ref = oracle_ranks(g, a.oracle, corpus.config().reset_probability, corpus.config().seed, info);
            timings["oracle"] = clock.lap();
            info["l2"] = l2_distance(ranks, ref);
            info["linf"] = linf_distance(ranks, ref);
            manifest["errors"] = info;
        }
        manifest["timings_s"] = timings;
        write_manifest(a.out / "manifest.json", manifest);
        std::cout << "applied " << ops.size() << " ops, recomputed " << segments << " walk segments\n";
    }

    // ---- convergence ----
    struct ConvergenceArgs
    {
        std::string nodes_range = "15..15";
        ConvergenceConfig cfg;
        fs::path out;
    };

    void cmd_convergence(ConvergenceArgs a)
    {
        std::tie(a.cfg.min_nodes, a.cfg.max_nodes) = parse_range(a.nodes_range);
        Stopwatch clock;
        const auto cells = convergence_sweep(a.cfg);
        const double t_sweep = clock.lap();
        const fs::path csv_path = a.out / "convergence.csv";
        {
            auto out = open_out(csv_path);
            write_convergence_csv(out, cells);
        }
        write_manifest(
            a.out / "manifest.json",
            {
                {"command", "convergence"},
                {"config",
                 {{"nodes_range", a.nodes_range},
                  {"graphs", a.cfg.graphs},
                  {"out_degree", a.cfg.out_degree},
                  {"walks", a.cfg.walks},
                  {"reset", a.cfg.reset_probabilities},
                  {"trials", a.cfg.trials}}},
                {"rng_seeds", {a.cfg.rng_seed}},
                {"timings_s", {{"sweep", t_sweep}}},
                {"outputs", {csv_path.string()}},
            }
        );
        std::cout << "wrote " << cells.size() << " cells to " << csv_path.string() << '\n';
    }

    // ---- sybil ----
    struct SybilArgs
    {
        SybilTopologyConfig topo;
        std::string attack = "0..500";
        std::size_t attack_step = 10;
        SweepConfig sweep;
        fs::path out;
    };

    void cmd_sybil(SybilArgs a)
    {
        const auto [lo, hi] = parse_range(a.attack);
        if (hi < lo || a.attack_step == 0)
        {
            throw ConfigError("attack range must satisfy A <= B with a positive step");
        }
        a.sweep.attack_edges.clear();
        for (std::size_t k = lo; k <= hi; k += a.attack_step)
        {
            a.sweep.attack_edges.push_back(k);
        }
        a.topo.attack_edges = hi;
        a.topo.attack_edges_to_seed = std::min(a.topo.attack_edges_to_seed, hi);
        a.sweep.rng_seed = a.topo.rng_seed;

        Stopwatch clock;
        const SybilScenario scenario = make_scenario(a.topo);
        const double t_topology = clock.lap();
        const auto rows = sweep_attack_edges(scenario, a.sweep);
        const double t_sweep = clock.lap();
        const auto files = write_sweep(a.out, rows);

        write_manifest(
            a.out / "manifest.json",
            {
                {"command", "sybil"},
                {"config",
                 {{"honest_nodes", a.topo.honest_nodes},
                  {"honest_edges", a.topo.honest_edges},
                  {"sybil_nodes", a.topo.sybil_nodes},
                  {"sybil_deg", a.topo.sybil_edges_per_node},
                  {"weight_range", {a.topo.weight_low, a.topo.weight_high}},
                  {"attack", a.attack},
                  {"attack_step", a.attack_step},
                  {"attack_to_seed", a.topo.attack_edges_to_seed},
                  {"walks", a.sweep.walks},
                  {"reset", a.sweep.reset_probabilities}}},
                {"rng_seeds", {a.topo.rng_seed}},
                {"rows", rows.size()},
                {"timings_s", {{"topology", t_topology}, {"sweep", t_sweep}}},
                {"outputs", path_strings(files)},
            }
        );
        std::cout << "wrote " << rows.size() << " sweep rows to " << (a.out / "sybil_sweep.csv").string() << '\n';
    }

    // ---- holdback ----
    struct HoldbackArgs
    {
        fs::path input;
        std::string format = "sqlite";
        std::size_t nodes = 5;
        std::size_t edges = 20;
        std::optional<std::uint64_t> rng_seed;
        fs::path out;
    };

    // Writes the initial graph and the held-back blocks as a mutation script.
    void cmd_holdback(const HoldbackArgs& a)
    {
        Stopwatch clock;
        const BlockStream stream = read_blocks(a.input, parse_ledger_format(a.format));
        const HoldbackSplit split = holdback_split(stream.records, a.nodes, a.edges, a.rng_seed);
        FlattenResult initial = flatten(std::span<const BlockRecord>(split.initial));

        // Replay the delta blocks on a copy to recover per-pair net changes as script ops.
        InteractionGraph after = initial.graph;
        LedgerFlattener flattener(after);
        const auto deltas = flattener.ingest_batch(split.delta);
        std::vector<DeltaOp> ops;
        for (const GraphDelta& d : deltas)
        {
            if (d.kind == DeltaKind::NodeAdded)
            {
                ops.push_back({DeltaOp::Kind::AddNode, after.display_label(d.source), "", 0.0});
            }
        }
        std::set<std::pair<NodeId, NodeId>> pairs;
        for (const GraphDelta& d : deltas)
        {
            if (d.kind != DeltaKind::NodeAdded)
            {
                pairs.emplace(std::min(d.source, d.target), std::max(d.source, d.target));
            }
        }
        for (const auto& [x, y] : pairs)
        {
            const bool existed = initial.graph.contains(x) && initial.graph.contains(y);
            const double change = after.net_flow(x, y) - (existed ? initial.graph.net_flow(x, y) : 0.0);
            ops.push_back({DeltaOp::Kind::Flow, after.display_label(x), after.display_label(y), change});
        }
        const double t_split = clock.lap();

        const fs::path graph_path = a.out / "initial.csv";
        const fs::path delta_path = a.out / "delta.csv";
        save_graph(graph_path, initial.graph);
        {
            auto out = open_out(delta_path);
            write_delta_ops(out, ops);
        }
        write_manifest(
            a.out / "manifest.json",
            {
                {"command", "holdback"},
                {"config",
                 {{"input", a.input.string()},
                  {"format", a.format},
                  {"nodes", a.nodes},
                  {"edges", a.edges},
                  {"rng_seed", a.rng_seed ? json(*a.rng_seed) : json(nullptr)}}},
                {"graph_version", initial.graph.version()},
                {"initial_blocks", split.initial.size()},
                {"delta_blocks", split.delta.size()},
                {"ops", ops.size()},
                {"report", report_json(initial.report)},
                {"timings_s", {{"split", t_split}}},
                {"outputs", {graph_path.string(), node_list_path(graph_path).string(), delta_path.string()}},
            }
        );
        std::cout << "held back " << split.delta.size() << " blocks as " << ops.size() << " ops\n";
    }

    // ---- synth-ledger ----
    struct SynthArgs
    {
        SyntheticLedgerConfig cfg;
        std::string format = "sqlite";
        fs::path out;
    };

    void cmd_synth(const SynthArgs& a)
    {
        Stopwatch clock;
        const auto blocks = synthetic_ledger(a.cfg);
        if (parse_ledger_format(a.format) == LedgerFormat::Csv)
        {
            auto out = open_out(a.out);
            write_blocks_csv(out, blocks);
        }
        else
        {
            if (a.out.has_parent_path())
            {
                fs::create_directories(a.out.parent_path());
            }
            write_blocks_sqlite(a.out, blocks);
        }
        write_manifest(
            a.out.string() + ".manifest.json",
            {
                {"command", "synth-ledger"},
                {"config",
                 {{"keys", a.cfg.keys},
                  {"blocks", a.cfg.blocks},
                  {"partners_per_key", a.cfg.partners_per_key},
                  {"agreement_fraction", a.cfg.agreement_fraction},
                  {"format", a.format}}},
                {"rng_seeds", {a.cfg.rng_seed}},
                {"timings_s", {{"generate_and_write", clock.lap()}}},
                {"outputs", {a.out.string()}},
            }
        );
        std::cout << "wrote " << blocks.size() << " blocks to " << a.out.string() << '\n';
    }
}

int main(int argc, char** argv)
{
    CLI::App app{"Personalized random-walk trust ranking"};
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Flatten a block ledger into a graph CSV");
    c_ingest->add_option("--input", ingest.input, "Ledger file")->required();
    c_ingest->add_option("--format", ingest.format, "sqlite or csv")->check(CLI::IsMember({"sqlite", "csv"}));
    c_ingest->add_option("--out", ingest.out, "Graph edge CSV (node list written alongside)")->required();

    RankArgs rank_args;
    auto* c_rank = app.add_subcommand("rank", "Estimate personalized ranks by random walks");
    c_rank->add_option("--graph", rank_args.graph)->required();
    c_rank->add_option("--seed-node", rank_args.seed_node)->required();
    c_rank->add_option("--walks", rank_args.walks)->capture_default_str();
    c_rank->add_option("--reset", rank_args.reset)->capture_default_str();
    c_rank->add_option("--rng-seed", rank_args.rng_seed)->capture_default_str();
    c_rank->add_option("--oracle", rank_args.oracle)->check(CLI::IsMember({"power", "exact", "none"}))->capture_default_str();
    c_rank->add_option("--out", rank_args.out)->required();

    UpdateArgs update;
    auto* c_update = app.add_subcommand("update", "Apply a mutation script and repair the stored walks");
    c_update->add_option("--graph", update.graph)->required();
    c_update->add_option("--delta", update.delta, "CSV op,node_a,node_b,delta_flow")->required();
    c_update->add_option("--corpus", update.corpus)->required();
    c_update->add_option("--out", update.out)->required();
    c_update->add_flag("--verify", update.verify, "Compare against a freshly sampled corpus");
    c_update->add_option("--oracle", update.oracle)->check(CLI::IsMember({"power", "exact", "none"}))->capture_default_str();

    ConvergenceArgs conv;
    auto* c_conv = app.add_subcommand("convergence", "Estimator error against the exact solution");
    c_conv->add_option("--nodes-range", conv.nodes_range, "A..B")->capture_default_str();
    c_conv->add_option("--graphs", conv.cfg.graphs)->capture_default_str();
    c_conv->add_option("--out-degree", conv.cfg.out_degree)->capture_default_str();
    c_conv->add_option("--walks-list", conv.cfg.walks)->delimiter(',');
    c_conv->add_option("--reset-list", conv.cfg.reset_probabilities)->delimiter(',');
    c_conv->add_option("--trials", conv.cfg.trials)->capture_default_str();
    c_conv->add_option("--rng-seed", conv.cfg.rng_seed)->capture_default_str();
    c_conv->add_option("--out", conv.out)->required();

    SybilArgs sybil;
    sybil.topo.attack_edges_to_seed = 5;
    sybil.sweep.reset_probabilities = {0.1, 0.3, 0.5, 0.7};
    auto* c_sybil = app.add_subcommand("sybil", "Attack-edge sweep with ROC output");
    c_sybil->add_option("--honest-nodes", sybil.topo.honest_nodes)->capture_default_str();
    c_sybil->add_option("--honest-edges", sybil.topo.honest_edges)->capture_default_str();
    c_sybil->add_option("--sybil-nodes", sybil.topo.sybil_nodes)->capture_default_str();
    c_sybil->add_option("--sybil-deg", sybil.topo.sybil_edges_per_node)->capture_default_str();
    c_sybil->add_option("--attack", sybil.attack, "A..B")->capture_default_str();
    c_sybil->add_option("--attack-step", sybil.attack_step)->capture_default_str();
    c_sybil->add_option("--attack-to-seed", sybil.topo.attack_edges_to_seed)->capture_default_str();
    c_sybil->add_option("--walks", sybil.sweep.walks)->capture_default_str();
    c_sybil->add_option("--reset-list", sybil.sweep.reset_probabilities)->delimiter(',');
    c_sybil->add_option("--rng-seed", sybil.topo.rng_seed)->capture_default_str();
    c_sybil->add_option("--out", sybil.out)->required();

    HoldbackArgs holdback;
    auto* c_hold = app.add_subcommand("holdback", "Split a ledger into an initial graph and a mutation script");
    c_hold->add_option("--input", holdback.input)->required();
    c_hold->add_option("--format", holdback.format)->check(CLI::IsMember({"sqlite", "csv"}));
    c_hold->add_option("--nodes", holdback.nodes)->capture_default_str();
    c_hold->add_option("--edges", holdback.edges)->capture_default_str();
    c_hold->add_option("--rng-seed", holdback.rng_seed);
    c_hold->add_option("--out", holdback.out)->required();

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth-ledger", "Write a synthetic block ledger");
    c_synth->add_option("--keys", synth.cfg.keys)->capture_default_str();
    c_synth->add_option("--blocks", synth.cfg.blocks)->capture_default_str();
    c_synth->add_option("--agreement-fraction", synth.cfg.agreement_fraction)->capture_default_str();
    c_synth->add_option("--rng-seed", synth.cfg.rng_seed)->capture_default_str();
    c_synth->add_option("--format", synth.format)->check(CLI::IsMember({"sqlite", "csv"}));
    c_synth->add_option("--out", synth.out)->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try
    {
        if (*c_ingest)
        {
            cmd_ingest(ingest);
        }
        else if (*c_rank)
        {
            cmd_rank(rank_args);
        }
        else if (*c_update)
        {
            cmd_update(update);
        }
        else if (*c_conv)
        {
            cmd_convergence(conv);
        }
        else if (*c_sybil)
        {
            cmd_sybil(sybil);
        }
        else if (*c_hold)
        {
            cmd_holdback(holdback);
        }
        else if (*c_synth)
        {
            cmd_synth(synth);
        }
    }
    catch (const FormatError& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_format;
    }
    catch (const StateError& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_state;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const std::filesystem::filesystem_error& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_format;
    }
    return 0;
}
