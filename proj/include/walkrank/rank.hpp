#pragma once

#include "walkrank/graph.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace walkrank
{
    /// Node -> score map, entries sorted by handle. Absent nodes score 0.
    class RankVector
    {
    public:
        using Entry = std::pair<NodeId, double>;

        RankVector() = default;
        /// Entries need not be sorted; duplicate handles are rejected.
        explicit RankVector(std::vector<Entry> entries);

        double operator[](NodeId u) const;
        const std::vector<Entry>& entries() const noexcept { return m_entries; }
        std::size_t size() const noexcept { return m_entries.size(); }
        double sum() const;

    private:
        std::vector<Entry> m_entries;
    };

    double linf_distance(const RankVector& a, const RankVector& b);
    double l2_distance(const RankVector& a, const RankVector& b);

    struct ScoredNode
    {
        NodeId node;
        std::string label;
        double score = 0.0;
    };

    /**
     * Deterministic ranking order: descending score, ties by ascending label.
     * Every live node of `g` is listed; nodes missing from `ranks` score 0.
     */
    std::vector<ScoredNode> ordered_ranking(const RankVector& ranks, const InteractionGraph& g);

    /// `node_label,score` CSV in ordered_ranking order.
    void write_rank_csv(std::ostream& out, const RankVector& ranks, const InteractionGraph& g);
}
