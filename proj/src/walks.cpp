#include "walkrank/walks.hpp"

#include "walkrank/csv.hpp"
#include "walkrank/errors.hpp"
#include "walkrank/parallel.hpp"
#include "walkrank/rng.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <istream>
#include <ostream>
#include <sstream>

namespace walkrank
{
    namespace
    {
        // Stream domains keep fresh samples and repairs on disjoint keys.
        constexpr std::uint64_t sample_domain = 0;
        constexpr std::uint64_t repair_domain = 1;

        // Continues `walk` from its last node, which has already been counted.
        void extend(Walk& walk, const InteractionGraph& g, double c, StreamRng& rng)
        {
            while (true)
            {
                const NodeId u = walk.nodes.back();
                if (g.is_dangling(u))
                {
                    walk.reason = StopReason::Dangling;
                    return;
                }
                if (rng.uniform() < c || walk.nodes.size() >= max_walk_nodes)
                {
                    walk.reason = StopReason::Stopped;
                    return;
                }
                walk.nodes.push_back(g.sample_successor(u, rng.uniform()));
            }
        }

        const WalkCorpus::WalkIndex empty_index;
    }

    void WalkConfig::validate() const
    {
        if (walks < 1)
        {
            throw ConfigError("walk count must be at least 1");
        }
        if (!(reset_probability > 0.0 && reset_probability < 1.0))
        {
            throw ConfigError("reset probability must lie in (0, 1)");
        }
        if (walks > std::numeric_limits<std::uint32_t>::max())
        {
            throw ConfigError("too many walks");
        }
    }

    std::string_view to_string(StopReason reason)
    {
        return reason == StopReason::Dangling ? "dangling" : "stopped";
    }

    WalkCorpus::WalkCorpus(WalkConfig cfg, std::vector<Walk> walks, std::uint64_t version)
        : m_cfg(cfg)
        , m_walks(std::move(walks))
        , m_version(version)
    {
        rebuild_index();
    }

    const WalkCorpus::WalkIndex& WalkCorpus::visits_of(NodeId u) const
    {
        auto it = m_index.find(u);
        return it == m_index.end() ? empty_index : it->second;
    }

    bool WalkCorpus::index_consistent() const
    {
        WalkCorpus fresh(m_cfg, m_walks, m_version);
        return fresh.m_index == m_index && fresh.m_total_visits == m_total_visits;
    }

    void WalkCorpus::rebuild_index()
    {
        m_index.clear();
        m_total_visits = 0;
        for (std::size_t w = 0; w < m_walks.size(); ++w)
        {
            index_suffix(static_cast<std::uint32_t>(w), 0);
            m_total_visits += m_walks[w].nodes.size();
        }
    }

    void WalkCorpus::unindex_suffix(std::uint32_t walk_id, std::size_t keep)
    {
        const auto& nodes = m_walks[walk_id].nodes;
        for (std::size_t i = keep; i < nodes.size(); ++i)
        {
            auto node_it = m_index.find(nodes[i]);
            if (node_it == m_index.end())
            {
                continue;
            }
            auto it = node_it->second.find(walk_id);
            if (it != node_it->second.end() && it->second >= keep)
            {
                node_it->second.erase(it);
                if (node_it->second.empty())
                {
                    m_index.erase(node_it);
                }
            }
        }
    }

    void WalkCorpus::index_suffix(std::uint32_t walk_id, std::size_t from)
    {
        const auto& nodes = m_walks[walk_id].nodes;
        for (std::size_t i = from; i < nodes.size(); ++i)
        {
            // emplace keeps an earlier first position
            m_index[nodes[i]].emplace(walk_id, static_cast<std::uint32_t>(i));
        }
    }

    WalkCorpus sample_corpus(const InteractionGraph& g, const WalkConfig& cfg)
    {
        cfg.validate();
        if (!g.contains(cfg.seed))
        {
            throw ConfigError("seed node does not exist");
        }
        std::vector<Walk> walks(cfg.walks);
        parallel_for(
            cfg.walks,
            [&](std::size_t k)
            {
                StreamRng rng(cfg.rng_seed, k, g.version(), sample_domain);
                Walk& w = walks[k];
                w.nodes.push_back(cfg.seed);
                extend(w, g, cfg.reset_probability, rng);
            }
        );
        return WalkCorpus(cfg, std::move(walks), g.version());
    }

    VisitEstimate estimate(const WalkCorpus& corpus)
    {
        if (corpus.empty())
        {
            throw ConfigError("cannot estimate from an empty corpus");
        }
        NodeId::value_type bound = 0;
        for (const Walk& w : corpus.walks())
        {
            for (NodeId u : w.nodes)
            {
                bound = std::max(bound, u.value + 1);
            }
        }
        std::vector<std::uint64_t> counts(bound, 0);
        std::uint64_t total = 0;
        for (const Walk& w : corpus.walks())
        {
            for (NodeId u : w.nodes)
            {
                ++counts[u.value];
            }
            total += w.nodes.size();
        }

        VisitEstimate est;
        est.total = total;
        std::vector<RankVector::Entry> entries;
        for (NodeId::value_type i = 0; i < bound; ++i)
        {
            if (counts[i] > 0)
            {
                est.visits.emplace_back(NodeId(i), counts[i]);
                entries.emplace_back(NodeId(i), static_cast<double>(counts[i]) / static_cast<double>(total));
            }
        }
        est.ranks = RankVector(std::move(entries));
        return est;
    }

    std::size_t apply_deltas(WalkCorpus& corpus, const InteractionGraph& g_after, std::span<const GraphDelta> deltas)
    {
        if (corpus.m_version + deltas.size() != g_after.version())
        {
            std::ostringstream msg;
            msg << "stale corpus: corpus is at graph version " << corpus.m_version << " but " << deltas.size()
                << " delta(s) lead to version " << g_after.version() << "; required corpus version "
                << (g_after.version() >= deltas.size() ? g_after.version() - deltas.size() : 0);
            throw StateError(msg.str());
        }
        const WalkConfig& cfg = corpus.m_cfg;
        if (!g_after.contains(cfg.seed))
        {
            throw StateError("seed removed; full resample required");
        }

        std::vector<NodeId> affected;
        for (const GraphDelta& d : deltas)
        {
            switch (d.kind)
            {
                case DeltaKind::NodeAdded:
                    break;
                case DeltaKind::EdgeReweighted:
                    if (d.old_weight != d.new_weight)
                    {
                        affected.push_back(d.source);
                    }
                    break;
                case DeltaKind::EdgeAdded:
                case DeltaKind::EdgeRemoved:
                case DeltaKind::NodeRemoved:
                    affected.push_back(d.source);
                    break;
                case DeltaKind::EdgeReversed:
                    // removal of (target -> source) plus addition of (source -> target)
                    affected.push_back(d.source);
                    affected.push_back(d.target);
                    break;
            }
        }

        // walk id -> last position kept
        std::map<std::uint32_t, std::size_t> cuts;
        for (NodeId u : affected)
        {
            auto node_it = corpus.m_index.find(u);
            if (node_it == corpus.m_index.end())
            {
                continue;
            }
            const bool alive = g_after.contains(u);
            for (const auto& [walk_id, first] : node_it->second)
            {
                if (!alive && first == 0)
                {
                    throw StateError("seed removed; full resample required");
                }
                const std::size_t cut = alive ? first : first - 1;
                auto [it, inserted] = cuts.emplace(walk_id, cut);
                if (!inserted)
                {
                    it->second = std::min(it->second, cut);
                }
            }
        }

        const std::uint64_t epoch = g_after.version();
        for (const auto& [walk_id, cut] : cuts)
        {
            Walk& w = corpus.m_walks[walk_id];
            if (!g_after.contains(w.nodes[cut]))
            {
                throw StateError("walk repair reached a removed node; full resample required");
            }
            corpus.unindex_suffix(walk_id, cut + 1);
            corpus.m_total_visits -= w.nodes.size() - (cut + 1);
            w.nodes.resize(cut + 1);

            StreamRng rng(cfg.rng_seed, walk_id, epoch, repair_domain);
            extend(w, g_after, cfg.reset_probability, rng);

            corpus.index_suffix(walk_id, cut + 1);
            corpus.m_total_visits += w.nodes.size() - (cut + 1);
        }
        corpus.m_version = g_after.version();
        return cuts.size();
    }

    RankVector rank(const WalkCorpus& corpus, const InteractionGraph& g)
    {
        if (corpus.version() != g.version())
        {
            throw StateError("corpus version does not match graph version");
        }
        const VisitEstimate est = estimate(corpus);
        std::vector<RankVector::Entry> entries;
        entries.reserve(g.node_count());
        for (NodeId u : g.nodes())
        {
            entries.emplace_back(u, est.ranks[u]);
        }
        return RankVector(std::move(entries));
    }

    std::string validate_walks(const WalkCorpus& corpus, const InteractionGraph& g)
    {
        std::ostringstream problem;
        if (corpus.version() != g.version())
        {
            problem << "corpus version " << corpus.version() << " != graph version " << g.version();
            return problem.str();
        }
        const NodeId seed = corpus.config().seed;
        for (std::size_t k = 0; k < corpus.walks().size(); ++k)
        {
            const Walk& w = corpus.walks()[k];
            if (w.nodes.empty() || w.nodes.front() != seed)
            {
                problem << "walk " << k << " does not start at the seed";
                return problem.str();
            }
            if (w.nodes.size() > max_walk_nodes)
            {
                problem << "walk " << k << " exceeds the length cap";
                return problem.str();
            }
            for (std::size_t i = 0; i < w.nodes.size(); ++i)
            {
                if (!g.contains(w.nodes[i]))
                {
                    problem << "walk " << k << " visits removed node " << w.nodes[i].value;
                    return problem.str();
                }
                if (i > 0 && !g.edge_weight(w.nodes[i - 1], w.nodes[i]))
                {
                    problem << "walk " << k << " uses missing edge " << w.nodes[i - 1].value << "->"
                            << w.nodes[i].value;
                    return problem.str();
                }
            }
            const bool ends_dangling = g.is_dangling(w.nodes.back());
            if (ends_dangling != (w.reason == StopReason::Dangling))
            {
                problem << "walk " << k << " has termination reason inconsistent with its last node";
                return problem.str();
            }
        }
        if (!corpus.index_consistent())
        {
            return "inverted index out of sync with walks";
        }
        return {};
    }

    void write_corpus(std::ostream& out, const WalkCorpus& corpus, const InteractionGraph& g)
    {
        const WalkConfig& cfg = corpus.config();
        out << "# walkrank-corpus 1\n";
        out << "# seed=" << g.display_label(cfg.seed) << '\n';
        out << "# walks=" << cfg.walks << '\n';
        out << "# reset=" << csv::format_double(cfg.reset_probability) << '\n';
        out << "# rng_seed=" << cfg.rng_seed << '\n';
        out << "# version=" << corpus.version() << '\n';
        for (std::size_t k = 0; k < corpus.walks().size(); ++k)
        {
            const Walk& w = corpus.walks()[k];
            out << k << ';' << to_string(w.reason) << ';';
            for (std::size_t i = 0; i < w.nodes.size(); ++i)
            {
                if (i > 0)
                {
                    out << ',';
                }
                out << g.display_label(w.nodes[i]);
            }
            out << '\n';
        }
    }

    WalkCorpus read_corpus(std::istream& in, const InteractionGraph& g)
    {
        WalkConfig cfg;
        std::optional<std::uint64_t> version;
        bool have_seed = false;
        bool have_walks = false;
        bool have_reset = false;
        std::vector<Walk> walks;
        std::string line;
        std::size_t line_no = 0;

        auto fail = [&](const std::string& what) -> FormatError
        { return FormatError("corpus line " + std::to_string(line_no) + ": " + what); };
        auto resolve = [&](std::string_view label)
        {
            auto id = g.find(label);
            if (!id)
            {
                // Unlabeled nodes are written as their decimal handle.
                if (auto raw = csv::parse_u64(label); raw && g.contains(NodeId(static_cast<NodeId::value_type>(*raw))))
                {
                    return NodeId(static_cast<NodeId::value_type>(*raw));
                }
                throw fail("unknown node " + std::string(label));
            }
            return *id;
        };

        while (std::getline(in, line))
        {
            ++line_no;
            if (!line.empty() && line.back() == '\r')
            {
                line.pop_back();
            }
            if (line.empty())
            {
                continue;
            }
            if (line.front() == '#')
            {
                const auto eq = line.find('=');
                if (eq == std::string::npos)
                {
                    continue;
                }
                const std::string key = line.substr(2, eq - 2);
                const std::string_view value = std::string_view(line).substr(eq + 1);
                if (key == "seed")
                {
                    cfg.seed = resolve(value);
                    have_seed = true;
                }
                else if (key == "walks")
                {
                    auto v = csv::parse_u64(value);
                    if (!v)
                    {
                        throw fail("bad walks");
                    }
                    cfg.walks = *v;
                    have_walks = true;
                }
                else if (key == "reset")
                {
                    auto v = csv::parse_double(value);
                    if (!v)
                    {
                        throw fail("bad reset");
                    }
                    cfg.reset_probability = *v;
                    have_reset = true;
                }
                else if (key == "rng_seed")
                {
                    auto v = csv::parse_u64(value);
                    if (!v)
                    {
                        throw fail("bad rng_seed");
                    }
                    cfg.rng_seed = *v;
                }
                else if (key == "version")
                {
                    version = csv::parse_u64(value);
                    if (!version)
                    {
                        throw fail("bad version");
                    }
                }
                continue;
            }

            const auto parts = csv::split(line, ';');
            if (parts.size() != 3)
            {
                throw fail("expected walk_id;reason;nodes");
            }
            const auto id = csv::parse_u64(parts[0]);
            if (!id || *id != walks.size())
            {
                throw fail("walk ids must be consecutive from 0");
            }
            Walk w;
            if (parts[1] == "stopped")
            {
                w.reason = StopReason::Stopped;
            }
            else if (parts[1] == "dangling")
            {
                w.reason = StopReason::Dangling;
            }
            else
            {
                throw fail("unknown termination reason");
            }
            for (std::string_view label : csv::split(parts[2]))
            {
                w.nodes.push_back(resolve(label));
            }
            walks.push_back(std::move(w));
        }

        if (!have_seed || !have_walks || !have_reset || !version)
        {
            throw FormatError("corpus header incomplete (need seed, walks, reset, version)");
        }
        if (walks.size() != cfg.walks)
        {
            throw FormatError("corpus declares " + std::to_string(cfg.walks) + " walks but lists " + std::to_string(walks.size()));
        }
        cfg.validate();
        return WalkCorpus(cfg, std::move(walks), *version);
    }
}
