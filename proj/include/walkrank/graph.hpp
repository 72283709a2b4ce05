#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace walkrank
{
    /// Stable node handle. Handles are never reused after removal.
    struct NodeId
    {
        using value_type = std::uint32_t;
        static constexpr value_type invalid_value = std::numeric_limits<value_type>::max();

        value_type value = invalid_value;

        constexpr NodeId() = default;
        constexpr explicit NodeId(value_type v)
            : value(v)
        {
        }

        constexpr bool valid() const noexcept { return value != invalid_value; }
        constexpr auto operator<=>(const NodeId&) const = default;
    };

    struct Edge
    {
        NodeId node;
        double weight = 0.0;
    };

    struct Transition
    {
        NodeId target;
        double probability = 0.0;
    };

    enum class DeltaKind
    {
        NodeAdded,
        NodeRemoved,
        EdgeAdded,
        EdgeRemoved,
        EdgeReweighted,
        EdgeReversed,
    };

    std::string_view to_string(DeltaKind kind);

    /**
     * One structural change of the graph. Every mutation advances the graph
     * version by exactly one and is described by exactly one delta.
     *
     * For edge kinds, (source, target) is the stored direction after the
     * change; EdgeRemoved carries the direction the edge had before removal
     * and EdgeReversed implies the old direction was (target, source).
     * Node kinds use `source` for the node and leave `target` invalid.
     */
    struct GraphDelta
    {
        DeltaKind kind = DeltaKind::NodeAdded;
        NodeId source;
        NodeId target;
        double old_weight = 0.0;
        double new_weight = 0.0;

        friend bool operator==(const GraphDelta&, const GraphDelta&) = default;
    };

    /**
     * Weighted interaction graph: one node per agent, at most one directed
     * edge per unordered node pair, weight = absolute net data flow.
     *
     * Edges point from the debtor to the creditor of a pair, i.e. toward the
     * node that uploaded more, so random walks drift toward contributors.
     * The signed net flow of every pair is kept in an accumulator; the stored
     * edge is always re-derived from it.
     *
     * Single writer. Copies are independent snapshots identified by version().
     */
    class InteractionGraph
    {
    public:
        /// Absolute accumulator magnitude beyond which byte counts lose integer precision.
        static constexpr double saturation_limit = 9007199254740992.0;  // 2^53

        NodeId add_node(std::optional<std::string> label = std::nullopt);

        /**
         * Adjusts the signed net flow of pair {a, b} by `delta_up_a_to_b`
         * (positive: a uploaded that many more bytes to b) and re-derives the
         * stored edge. A zero accumulator removes the edge.
         */
        GraphDelta upsert_net_flow(NodeId a, NodeId b, double delta_up_a_to_b);

        /// Adds `weight` to the flow that makes source -> target the stored direction.
        GraphDelta add_directed_weight(NodeId source, NodeId target, double weight)
        {
            return upsert_net_flow(target, source, weight);
        }

        /// Removes in-edges, then out-edges, then the node itself.
        std::vector<GraphDelta> remove_node(NodeId u);

        std::vector<Transition> out_distribution(NodeId u) const;

        /// Successor chosen by inverse-CDF over out-edge weights. `u01` in [0, 1).
        NodeId sample_successor(NodeId u, double u01) const;

        bool contains(NodeId u) const noexcept;
        std::optional<NodeId> find(std::string_view label) const;
        NodeId require(std::string_view label) const;

        const std::optional<std::string>& label(NodeId u) const;
        /// Label if present, decimal handle otherwise.
        std::string display_label(NodeId u) const;

        std::span<const Edge> out_edges(NodeId u) const;
        std::span<const Edge> in_edges(NodeId u) const;
        double out_weight(NodeId u) const;
        bool is_dangling(NodeId u) const;

        std::optional<double> edge_weight(NodeId source, NodeId target) const;
        /// Signed surplus of `a` over `b` (positive when a uploaded more).
        double net_flow(NodeId a, NodeId b) const;

        std::size_t node_count() const noexcept { return m_live_nodes; }
        std::size_t edge_count() const noexcept { return m_edge_count; }
        /// One past the largest handle ever issued; suitable for dense per-node arrays.
        std::size_t id_bound() const noexcept { return m_slots.size(); }
        /// Live nodes in ascending handle order.
        std::vector<NodeId> nodes() const;

        std::uint64_t version() const noexcept { return m_version; }

        /// Sum of |accumulator| over all pairs.
        double total_net_flow() const;

        /// Checks cached sums, transpose coherence and pair symmetry. Empty string when sound.
        std::string check_invariants() const;

    private:
        struct Slot
        {
            std::optional<std::string> label;
            std::vector<Edge> out;
            std::vector<Edge> in;
            double out_weight = 0.0;
            bool alive = false;
        };

        const Slot& slot(NodeId u) const;
        Slot& slot(NodeId u);
        void erase_edge(NodeId source, NodeId target);
        void insert_edge(NodeId source, NodeId target, double weight);
        void set_edge_weight(NodeId source, NodeId target, double weight);
        void refresh_out_weight(NodeId u);

        static std::uint64_t pair_key(NodeId a, NodeId b) noexcept;

        std::vector<Slot> m_slots;
        std::unordered_map<std::string, NodeId> m_by_label;
        // Signed surplus of the lower handle of each pair.
        std::unordered_map<std::uint64_t, double> m_net_flow;
        std::size_t m_live_nodes = 0;
        std::size_t m_edge_count = 0;
        std::uint64_t m_version = 0;
    };
}

template <>
struct std::hash<walkrank::NodeId>
{
    std::size_t operator()(walkrank::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
