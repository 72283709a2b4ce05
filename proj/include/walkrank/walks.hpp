#pragma once

#include "walkrank/graph.hpp"
#include "walkrank/rank.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace walkrank
{
    struct WalkConfig
    {
        std::size_t walks = 300;
        double reset_probability = 0.3;  // per-node stop probability
        std::uint64_t rng_seed = 0;
        NodeId seed;

        void validate() const;
    };

    enum class StopReason
    {
        Stopped,
        Dangling,
    };

    std::string_view to_string(StopReason reason);

    /// Node sequence starting at the seed. Position 0 counts as a visit.
    struct Walk
    {
        std::vector<NodeId> nodes;
        StopReason reason = StopReason::Stopped;

        friend bool operator==(const Walk&, const Walk&) = default;
    };

    /// Hard cap on nodes per walk (10,000 steps after the seed).
    inline constexpr std::size_t max_walk_nodes = 10001;

    /**
     * R seed-rooted walks plus an inverted index node -> (walk, first
     * position), stamped with the graph version the walks were sampled or
     * repaired against.
     */
    class WalkCorpus
    {
    public:
        using WalkIndex = std::map<std::uint32_t, std::uint32_t>;  // walk id -> first position

        WalkCorpus() = default;
        WalkCorpus(WalkConfig cfg, std::vector<Walk> walks, std::uint64_t version);

        const WalkConfig& config() const noexcept { return m_cfg; }
        const std::vector<Walk>& walks() const noexcept { return m_walks; }
        std::uint64_t version() const noexcept { return m_version; }
        /// Total visits V = sum of walk node counts.
        std::size_t total_visits() const noexcept { return m_total_visits; }
        bool empty() const noexcept { return m_walks.empty(); }

        /// Walks that visit `u`, with the position of their first visit.
        const WalkIndex& visits_of(NodeId u) const;

        /// True when the stored index equals one rebuilt from the walks.
        bool index_consistent() const;

        friend bool operator==(const WalkCorpus& a, const WalkCorpus& b)
        {
            return a.m_version == b.m_version && a.m_walks == b.m_walks;
        }

    private:
        friend std::size_t apply_deltas(WalkCorpus&, const InteractionGraph&, std::span<const GraphDelta>);

        void rebuild_index();
        void unindex_suffix(std::uint32_t walk_id, std::size_t keep);
        void index_suffix(std::uint32_t walk_id, std::size_t from);

        WalkConfig m_cfg;
        std::vector<Walk> m_walks;
        std::unordered_map<NodeId, WalkIndex> m_index;
        std::uint64_t m_version = 0;
        std::size_t m_total_visits = 0;
    };

    /**
     * Samples R independent walks. At each visited node the walk ends if the
     * node is dangling, otherwise stops with probability c, otherwise steps
     * to a successor drawn from the out-weight distribution.
     *
     * Walk k draws from its own stream keyed by (rng_seed, k, graph version),
     * so the corpus is a pure function of (graph version, config).
     */
    WalkCorpus sample_corpus(const InteractionGraph& g, const WalkConfig& cfg);

    struct VisitEstimate
    {
        std::vector<std::pair<NodeId, std::uint64_t>> visits;  // by handle, visited nodes only
        std::uint64_t total = 0;
        RankVector ranks;  // visits / total
    };

    /// Counts every visit (not only first visits) and normalizes by V.
    VisitEstimate estimate(const WalkCorpus& corpus);

    /**
     * Repairs the corpus after `g_after` absorbed `deltas` (in order) on top
     * of the corpus's graph version. Each walk touching a changed out-edge
     * source is cut at its first visit there and resampled from that node,
     * stop coin included; a removed node cuts the walk just before it.
     *
     * Returns the number of walk suffixes recomputed. Throws StateError when
     * the version stamps do not line up ("stale corpus") or the seed is gone.
     */
    std::size_t apply_deltas(WalkCorpus& corpus, const InteractionGraph& g_after, std::span<const GraphDelta> deltas);

    inline std::size_t apply_delta(WalkCorpus& corpus, const InteractionGraph& g_after, const GraphDelta& delta)
    {
        return apply_deltas(corpus, g_after, std::span<const GraphDelta>(&delta, 1));
    }

    /// Estimate over all live nodes of `g` (unvisited nodes score 0).
    RankVector rank(const WalkCorpus& corpus, const InteractionGraph& g);

    /// Empty string if every walk is valid against `g`; otherwise a description of the first violation.
    std::string validate_walks(const WalkCorpus& corpus, const InteractionGraph& g);

    /**
     * Text dump: `# key=value` header lines (seed label, walks, reset,
     * rng_seed, version), then one `walk_id;reason;label0,label1,...` line
     * per walk.
     */
    void write_corpus(std::ostream& out, const WalkCorpus& corpus, const InteractionGraph& g);
    /// Inverse of write_corpus; labels are resolved against `g`. Throws FormatError.
    WalkCorpus read_corpus(std::istream& in, const InteractionGraph& g);
}
