#include "walkrank/sybil.hpp"

#include "walkrank/csv.hpp"
#include "walkrank/errors.hpp"
#include "walkrank/generators.hpp"
#include "walkrank/parallel.hpp"
#include "walkrank/rng.hpp"
#include "walkrank/walks.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

namespace walkrank
{
    void SybilTopologyConfig::validate() const
    {
        if (honest_nodes < 1)
        {
            throw ConfigError("sybil topology needs at least one honest node");
        }
        if (!(weight_low >= 0.0) || !(weight_high > weight_low))
        {
            throw ConfigError("weight range must satisfy 0 <= low < high");
        }
        const std::size_t honest_capacity = honest_nodes * (honest_nodes - 1) / 2;
        if (honest_edges > honest_capacity)
        {
            throw ConfigError(
                "honest_edges " + std::to_string(honest_edges) + " exceeds simple-graph capacity "
                + std::to_string(honest_capacity)
            );
        }
        if (sybil_nodes > 0 && 2 * sybil_edges_per_node > sybil_nodes - 1)
        {
            throw ConfigError("sybil_edges_per_node must be at most (sybil_nodes - 1) / 2");
        }
        if (attack_edges > 0 && sybil_nodes == 0)
        {
            throw ConfigError("attack edges need a sybil region");
        }
        if (attack_edges_to_seed > attack_edges)
        {
            throw ConfigError("attack_edges_to_seed exceeds attack_edges");
        }
        if (attack_edges_to_seed > sybil_nodes)
        {
            throw ConfigError("attack_edges_to_seed exceeds sybil_nodes");
        }
        if (attack_edges - attack_edges_to_seed > (honest_nodes - 1) * sybil_nodes)
        {
            throw ConfigError("attack edges exceed honest-to-sybil capacity");
        }
    }

    LabeledGraph SybilScenario::with_attack_edges(std::size_t k) const
    {
        if (k > schedule.size())
        {
            throw ConfigError(
                "scenario schedules " + std::to_string(schedule.size()) + " attack edges, " + std::to_string(k)
                + " requested"
            );
        }
        LabeledGraph out = base;
        for (std::size_t i = 0; i < k; ++i)
        {
            out.graph.add_directed_weight(schedule[i].source, schedule[i].target, schedule[i].weight);
        }
        return out;
    }

    namespace
    {
        NodeId nid(std::size_t i) { return NodeId(static_cast<NodeId::value_type>(i)); }

        // `count` distinct unordered pairs within [first, first + n), uniform over ordered pairs.
        void add_uniform_edges(
            InteractionGraph& g, std::size_t first, std::size_t n, std::size_t count, double low, double high,
            StreamRng& rng
        )
        {
            const std::size_t capacity = n * (n - 1) / 2;
            if (2 * count <= capacity)
            {
                std::size_t placed = 0;
                while (placed < count)
                {
                    const std::size_t a = first + rng.below(n);
                    const std::size_t b = first + rng.below(n);
                    if (a == b || g.net_flow(nid(a), nid(b)) != 0.0)
                    {
                        continue;
                    }
                    g.add_directed_weight(nid(a), nid(b), rng.uniform_open_closed(low, high));
                    ++placed;
                }
                return;
            }
            // Dense request: enumerate all pairs instead of rejecting.
            std::vector<std::pair<std::size_t, std::size_t>> pairs;
            pairs.reserve(capacity);
            for (std::size_t a = 0; a < n; ++a)
            {
                for (std::size_t b = a + 1; b < n; ++b)
                {
                    pairs.emplace_back(first + a, first + b);
                }
            }
            shuffle(std::span(pairs), rng);
            for (std::size_t i = 0; i < count; ++i)
            {
                auto [a, b] = pairs[i];
                if (rng.bernoulli(0.5))
                {
                    std::swap(a, b);
                }
                g.add_directed_weight(nid(a), nid(b), rng.uniform_open_closed(low, high));
            }
        }

        // Each node in [first, first + n) gets `per_node` out-edges to partners it has no edge with yet.
        void add_out_edges(
            InteractionGraph& g, std::size_t first, std::size_t n, std::size_t per_node, double low, double high,
            StreamRng& rng
        )
        {
            std::vector<std::size_t> free;
            for (std::size_t i = 0; i < n; ++i)
            {
                const std::size_t u = first + i;
                std::size_t placed = 0;
                std::size_t attempts = 0;
                while (placed < per_node && attempts < 8 * per_node)
                {
                    ++attempts;
                    const std::size_t v = first + rng.below(n);
                    if (v == u || g.net_flow(nid(u), nid(v)) != 0.0)
                    {
                        continue;
                    }
                    g.add_directed_weight(nid(u), nid(v), rng.uniform_open_closed(low, high));
                    ++placed;
                }
                if (placed == per_node)
                {
                    continue;
                }
                free.clear();
                for (std::size_t j = 0; j < n; ++j)
                {
                    const std::size_t v = first + j;
                    if (v != u && g.net_flow(nid(u), nid(v)) == 0.0)
                    {
                        free.push_back(v);
                    }
                }
                if (free.size() < per_node - placed)
                {
                    throw ConfigError("sybil region cannot hold the requested out-degree");
                }
                shuffle(std::span(free), rng);
                for (std::size_t k = 0; placed < per_node; ++k, ++placed)
                {
                    g.add_directed_weight(nid(u), nid(free[k]), rng.uniform_open_closed(low, high));
                }
            }
        }
    }

    SybilScenario make_scenario(const SybilTopologyConfig& cfg)
    {
        cfg.validate();
        const std::size_t total = cfg.honest_nodes + cfg.sybil_nodes;

        SybilScenario sc;
        LabeledGraph& lg = sc.base;
        StreamRng label_rng(cfg.rng_seed, 0, 0, 0x6c6162);
        std::vector<std::size_t> perm(total);
        std::iota(perm.begin(), perm.end(), 0);
        shuffle(std::span(perm), label_rng);
        for (std::size_t i = 0; i < total; ++i)
        {
            lg.graph.add_node(padded_label(perm[i], total));
        }
        lg.regions.assign(cfg.honest_nodes, Region::Honest);
        lg.regions.resize(total, Region::Sybil);
        lg.seed = nid(0);

        StreamRng honest_rng(cfg.rng_seed, 1, 0, 0x6c6162);
        add_uniform_edges(lg.graph, 0, cfg.honest_nodes, cfg.honest_edges, cfg.weight_low, cfg.weight_high, honest_rng);
        StreamRng sybil_rng(cfg.rng_seed, 2, 0, 0x6c6162);
        if (cfg.sybil_nodes > 0)
        {
            add_out_edges(
                lg.graph, cfg.honest_nodes, cfg.sybil_nodes, cfg.sybil_edges_per_node, cfg.weight_low, cfg.weight_high,
                sybil_rng
            );
        }

        // Seed-sourced edges start at index 4 (or as late as fits) and spread over the rest.
        const std::size_t n_attack = cfg.attack_edges;
        const std::size_t n_seed = cfg.attack_edges_to_seed;
        std::vector<bool> seed_slot(n_attack, false);
        if (n_seed > 0)
        {
            const std::size_t p0 = std::min(first_seed_attack_index, n_attack - n_seed);
            for (std::size_t i = 0; i < n_seed; ++i)
            {
                seed_slot[p0 + i * (n_attack - p0) / n_seed] = true;
            }
        }
        StreamRng attack_rng(cfg.rng_seed, 3, 0, 0x6c6162);
        std::set<std::pair<std::size_t, std::size_t>> used;
        sc.schedule.reserve(n_attack);
        for (std::size_t i = 0; i < n_attack; ++i)
        {
            std::size_t source = 0;
            std::size_t target = 0;
            do
            {
                source = seed_slot[i] ? 0 : 1 + attack_rng.below(cfg.honest_nodes - 1);
                target = cfg.honest_nodes + attack_rng.below(cfg.sybil_nodes);
            } while (!used.emplace(source, target).second);
            sc.schedule.push_back({nid(source), nid(target), attack_rng.uniform_open_closed(cfg.weight_low, cfg.weight_high)}
            );
        }
        return sc;
    }

    LabeledGraph generate_topology(const SybilTopologyConfig& cfg)
    {
        const SybilScenario sc = make_scenario(cfg);
        return sc.with_attack_edges(cfg.attack_edges);
    }

    OrderedNodes ordered_nodes(const RankVector& ranks, const InteractionGraph& g, bool filter_zero)
    {
        OrderedNodes out;
        out.nodes = ordered_ranking(ranks, g);
        out.filtered = filter_zero;
        if (filter_zero)
        {
            const auto first_zero = std::find_if(out.nodes.begin(), out.nodes.end(), [](const ScoredNode& s) {
                return s.score == 0.0;
            });
            out.dropped_zero = static_cast<std::size_t>(out.nodes.end() - first_zero);
            out.nodes.erase(first_zero, out.nodes.end());
        }
        return out;
    }

    double trapezoid_area(std::span<const std::pair<double, double>> points)
    {
        double area = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i)
        {
            area += (points[i].first - points[i - 1].first) * (points[i].second + points[i - 1].second) / 2.0;
        }
        return area;
    }

    RocResult roc(const OrderedNodes& ordered, const LabeledGraph& truth, SingleClass policy)
    {
        RocResult out;
        out.dropped_zero = ordered.dropped_zero;
        out.zero_filtered = ordered.filtered;
        std::size_t honest = 0;
        std::size_t sybil = 0;
        out.ordered.reserve(ordered.nodes.size());
        for (const ScoredNode& s : ordered.nodes)
        {
            out.ordered.push_back(s.node);
            (truth.is_sybil(s.node) ? sybil : honest) += 1;
        }
        if (honest == 0 || sybil == 0)
        {
            if (policy == SingleClass::Reject)
            {
                throw ConfigError("degenerate ROC: listed nodes contain a single class");
            }
            if (sybil == 0)
            {
                out.points = {{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
                out.auroc = 1.0;
            }
            else
            {
                out.points = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}};
                out.auroc = 0.0;
            }
            return out;
        }

        out.points.reserve(ordered.nodes.size() + 1);
        out.points.emplace_back(0.0, 0.0);
        std::size_t tp = 0;
        std::size_t fp = 0;
        for (std::size_t k = 0; k < out.ordered.size(); ++k)
        {
            (truth.is_sybil(out.ordered[k]) ? fp : tp) += 1;
            out.points.emplace_back(
                static_cast<double>(fp) / static_cast<double>(sybil), static_cast<double>(tp) / static_cast<double>(honest)
            );
            if (k + 1 == honest)
            {
                out.fp_rate = static_cast<double>(fp) / static_cast<double>(sybil);
                out.fn_rate = static_cast<double>(honest - tp) / static_cast<double>(honest);
            }
        }
        out.auroc = trapezoid_area(out.points);
        return out;
    }

    std::vector<SweepRow> sweep_attack_edges(const SybilScenario& scenario, const SweepConfig& cfg)
    {
        if (cfg.attack_edges.empty() || cfg.reset_probabilities.empty())
        {
            throw ConfigError("sweep needs at least one attack count and one reset probability");
        }
        const std::size_t n_reset = cfg.reset_probabilities.size();
        std::vector<SweepRow> rows(cfg.attack_edges.size() * n_reset * 2);
        for (std::size_t a = 0; a < cfg.attack_edges.size(); ++a)
        {
            if (cfg.attack_edges[a] > scenario.schedule.size())
            {
                throw ConfigError("attack count exceeds the scenario schedule");
            }
        }
        for (double c : cfg.reset_probabilities)
        {
            WalkConfig{cfg.walks, c, cfg.rng_seed, scenario.base.seed}.validate();
        }

        parallel_for(
            cfg.attack_edges.size(),
            [&](std::size_t a)
            {
                const LabeledGraph lg = scenario.with_attack_edges(cfg.attack_edges[a]);
                for (std::size_t r = 0; r < n_reset; ++r)
                {
                    const WalkConfig wc{cfg.walks, cfg.reset_probabilities[r], cfg.rng_seed, lg.seed};
                    const WalkCorpus corpus = sample_corpus(lg.graph, wc);
                    const RankVector ranks = rank(corpus, lg.graph);
                    for (int f = 0; f < 2; ++f)
                    {
                        SweepRow& row = rows[(a * n_reset + r) * 2 + static_cast<std::size_t>(f)];
                        row.attack_edges = cfg.attack_edges[a];
                        row.reset_probability = wc.reset_probability;
                        row.filtered = f == 1;
                        row.result = roc(ordered_nodes(ranks, lg.graph, row.filtered), lg, SingleClass::Resolve);
                    }
                }
            }
        );
        return rows;
    }

    std::string sweep_cell_key(const SweepRow& row)
    {
        char c[32];
        std::snprintf(c, sizeof c, "%g", row.reset_probability);
        return std::to_string(row.attack_edges) + "_" + c + "_" + (row.filtered ? "1" : "0");
    }

    std::vector<std::filesystem::path> write_sweep(const std::filesystem::path& dir, std::span<const SweepRow> rows)
    {
        std::filesystem::create_directories(dir);
        std::vector<std::filesystem::path> written;
        const auto summary = dir / "sybil_sweep.csv";
        std::ofstream out(summary);
        if (!out)
        {
            throw FormatError("cannot write " + summary.string());
        }
        out << "attack_edges,reset_prob,filtered,auroc,fp_rate,fn_rate,dropped_zero\n";
        for (const SweepRow& row : rows)
        {
            out << row.attack_edges << ',' << csv::format_double(row.reset_probability) << ','
                << (row.filtered ? 1 : 0) << ',' << csv::format_double(row.result.auroc) << ','
                << csv::format_double(row.result.fp_rate) << ',' << csv::format_double(row.result.fn_rate) << ','
                << row.result.dropped_zero << '\n';

            const auto path = dir / ("roc_" + sweep_cell_key(row) + ".csv");
            std::ofstream pts(path);
            if (!pts)
            {
                throw FormatError("cannot write " + path.string());
            }
            pts << "fpr,tpr\n";
            for (const auto& [x, y] : row.result.points)
            {
                pts << csv::format_double(x) << ',' << csv::format_double(y) << '\n';
            }
            written.push_back(path);
        }
        written.insert(written.begin(), summary);
        return written;
    }
}
