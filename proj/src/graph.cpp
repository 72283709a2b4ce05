#include "walkrank/graph.hpp"

#include "walkrank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace walkrank
{
    std::string_view to_string(DeltaKind kind)
    {
        switch (kind)
        {
            case DeltaKind::NodeAdded: return "NodeAdded";
            case DeltaKind::NodeRemoved: return "NodeRemoved";
            case DeltaKind::EdgeAdded: return "EdgeAdded";
            case DeltaKind::EdgeRemoved: return "EdgeRemoved";
            case DeltaKind::EdgeReweighted: return "EdgeReweighted";
            case DeltaKind::EdgeReversed: return "EdgeReversed";
        }
        return "?";
    }

    namespace
    {
        struct DerivedEdge
        {
            NodeId source;
            NodeId target;
            double weight = 0.0;
        };

        // acc is the surplus of `lo`; the edge points at whoever uploaded more.
        DerivedEdge derive(NodeId lo, NodeId hi, double acc)
        {
            if (acc > 0.0)
            {
                return {hi, lo, acc};
            }
            if (acc < 0.0)
            {
                return {lo, hi, -acc};
            }
            return {};
        }
    }

    NodeId InteractionGraph::add_node(std::optional<std::string> label)
    {
        if (label && m_by_label.contains(*label))
        {
            throw GraphError("label exists: " + *label);
        }
        if (m_slots.size() >= NodeId::invalid_value)
        {
            throw GraphError("node handle space exhausted");
        }
        const NodeId id(static_cast<NodeId::value_type>(m_slots.size()));
        Slot s;
        s.alive = true;
        s.label = std::move(label);
        if (s.label)
        {
            m_by_label.emplace(*s.label, id);
        }
        m_slots.push_back(std::move(s));
        ++m_live_nodes;
        ++m_version;
        return id;
    }

    GraphDelta InteractionGraph::upsert_net_flow(NodeId a, NodeId b, double delta_up_a_to_b)
    {
        if (a == b)
        {
            throw GraphError("self-interaction rejected");
        }
        if (!contains(a) || !contains(b))
        {
            throw GraphError("no such node");
        }
        if (!std::isfinite(delta_up_a_to_b))
        {
            throw GraphError("net flow delta must be finite");
        }

        const NodeId lo = std::min(a, b);
        const NodeId hi = std::max(a, b);
        const std::uint64_t key = pair_key(lo, hi);
        auto it = m_net_flow.find(key);
        const double old_acc = it == m_net_flow.end() ? 0.0 : it->second;
        double new_acc = old_acc + (a == lo ? delta_up_a_to_b : -delta_up_a_to_b);
        if (std::abs(new_acc) > saturation_limit)
        {
            std::clog << "walkrank: warning: net flow between nodes " << lo.value << " and " << hi.value
                      << " saturated at 2^53 bytes\n";
            new_acc = std::copysign(saturation_limit, new_acc);
        }

        const DerivedEdge before = derive(lo, hi, old_acc);
        const DerivedEdge after = derive(lo, hi, new_acc);

        if (new_acc == 0.0)
        {
            if (it != m_net_flow.end())
            {
                m_net_flow.erase(it);
            }
        }
        else if (it == m_net_flow.end())
        {
            m_net_flow.emplace(key, new_acc);
        }
        else
        {
            it->second = new_acc;
        }

        GraphDelta delta;
        delta.old_weight = before.weight;
        delta.new_weight = after.weight;
        if (!before.source.valid() && !after.source.valid())
        {
            // Zero-to-zero: nothing stored; report a no-op reweight in the b -> a sense.
            delta.kind = DeltaKind::EdgeReweighted;
            delta.source = b;
            delta.target = a;
        }
        else if (!before.source.valid())
        {
            insert_edge(after.source, after.target, after.weight);
            delta.kind = DeltaKind::EdgeAdded;
            delta.source = after.source;
            delta.target = after.target;
        }
        else if (!after.source.valid())
        {
            erase_edge(before.source, before.target);
            delta.kind = DeltaKind::EdgeRemoved;
            delta.source = before.source;
            delta.target = before.target;
        }
        else if (before.source == after.source)
        {
            set_edge_weight(after.source, after.target, after.weight);
            delta.kind = DeltaKind::EdgeReweighted;
            delta.source = after.source;
            delta.target = after.target;
        }
        else
        {
            erase_edge(before.source, before.target);
            insert_edge(after.source, after.target, after.weight);
            delta.kind = DeltaKind::EdgeReversed;
            delta.source = after.source;
            delta.target = after.target;
        }
        ++m_version;
        return delta;
    }

    std::vector<GraphDelta> InteractionGraph::remove_node(NodeId u)
    {
        if (!contains(u))
        {
            throw GraphError("no such node");
        }
        std::vector<GraphDelta> deltas;
        const std::vector<Edge> in = slot(u).in;
        const std::vector<Edge> out = slot(u).out;
        deltas.reserve(in.size() + out.size() + 1);

        for (const Edge& e : in)
        {
            erase_edge(e.node, u);
            m_net_flow.erase(pair_key(std::min(u, e.node), std::max(u, e.node)));
            ++m_version;
            deltas.push_back({DeltaKind::EdgeRemoved, e.node, u, e.weight, 0.0});
        }
        for (const Edge& e : out)
        {
            erase_edge(u, e.node);
            m_net_flow.erase(pair_key(std::min(u, e.node), std::max(u, e.node)));
            ++m_version;
            deltas.push_back({DeltaKind::EdgeRemoved, u, e.node, e.weight, 0.0});
        }

        Slot& s = slot(u);
        if (s.label)
        {
            m_by_label.erase(*s.label);
        }
        s = Slot{};
        --m_live_nodes;
        ++m_version;
        deltas.push_back({DeltaKind::NodeRemoved, u, NodeId{}, 0.0, 0.0});
        return deltas;
    }

    std::vector<Transition> InteractionGraph::out_distribution(NodeId u) const
    {
        const Slot& s = slot(u);
        std::vector<Transition> result;
        result.reserve(s.out.size());
        for (const Edge& e : s.out)
        {
            result.push_back({e.node, e.weight / s.out_weight});
        }
        return result;
    }

    NodeId InteractionGraph::sample_successor(NodeId u, double u01) const
    {
        const Slot& s = slot(u);
        if (s.out.empty())
        {
            return NodeId{};
        }
        const double threshold = u01 * s.out_weight;
        double cumulative = 0.0;
        for (const Edge& e : s.out)
        {
            cumulative += e.weight;
            if (threshold < cumulative)
            {
                return e.node;
            }
        }
        return s.out.back().node;
    }

    bool InteractionGraph::contains(NodeId u) const noexcept
    {
        return u.valid() && u.value < m_slots.size() && m_slots[u.value].alive;
    }

    std::optional<NodeId> InteractionGraph::find(std::string_view label) const
    {
        auto it = m_by_label.find(std::string(label));
        if (it == m_by_label.end())
        {
            return std::nullopt;
        }
        return it->second;
    }

    NodeId InteractionGraph::require(std::string_view label) const
    {
        if (auto id = find(label))
        {
            return *id;
        }
        throw GraphError("no such node: " + std::string(label));
    }

    const std::optional<std::string>& InteractionGraph::label(NodeId u) const
    {
        return slot(u).label;
    }

    std::string InteractionGraph::display_label(NodeId u) const
    {
        const auto& l = slot(u).label;
        return l ? *l : std::to_string(u.value);
    }

    std::span<const Edge> InteractionGraph::out_edges(NodeId u) const
    {
        return slot(u).out;
    }

    std::span<const Edge> InteractionGraph::in_edges(NodeId u) const
    {
        return slot(u).in;
    }

    double InteractionGraph::out_weight(NodeId u) const
    {
        return slot(u).out_weight;
    }

    bool InteractionGraph::is_dangling(NodeId u) const
    {
        return slot(u).out.empty();
    }

    std::optional<double> InteractionGraph::edge_weight(NodeId source, NodeId target) const
    {
        for (const Edge& e : slot(source).out)
        {
            if (e.node == target)
            {
                return e.weight;
            }
        }
        return std::nullopt;
    }

    double InteractionGraph::net_flow(NodeId a, NodeId b) const
    {
        if (!contains(a) || !contains(b))
        {
            throw GraphError("no such node");
        }
        const NodeId lo = std::min(a, b);
        const NodeId hi = std::max(a, b);
        auto it = m_net_flow.find(pair_key(lo, hi));
        if (it == m_net_flow.end())
        {
            return 0.0;
        }
        return a == lo ? it->second : -it->second;
    }

    std::vector<NodeId> InteractionGraph::nodes() const
    {
        std::vector<NodeId> result;
        result.reserve(m_live_nodes);
        for (std::size_t i = 0; i < m_slots.size(); ++i)
        {
            if (m_slots[i].alive)
            {
                result.emplace_back(static_cast<NodeId::value_type>(i));
            }
        }
        return result;
    }

    double InteractionGraph::total_net_flow() const
    {
        double total = 0.0;
        for (const auto& [key, acc] : m_net_flow)
        {
            total += std::abs(acc);
        }
        return total;
    }

    std::string InteractionGraph::check_invariants() const
    {
        std::ostringstream problems;
        std::size_t edges = 0;
        for (std::size_t i = 0; i < m_slots.size(); ++i)
        {
            const Slot& s = m_slots[i];
            if (!s.alive)
            {
                if (!s.out.empty() || !s.in.empty())
                {
                    problems << "removed node " << i << " still has edges\n";
                }
                continue;
            }
            const NodeId u(static_cast<NodeId::value_type>(i));
            double sum = 0.0;
            for (const Edge& e : s.out)
            {
                ++edges;
                sum += e.weight;
                if (!(e.weight > 0.0))
                {
                    problems << "non-positive edge weight " << i << "->" << e.node.value << "\n";
                }
                if (!contains(e.node))
                {
                    problems << "edge to removed node " << i << "->" << e.node.value << "\n";
                    continue;
                }
                if (edge_weight(e.node, u))
                {
                    problems << "both directions stored for pair " << i << "," << e.node.value << "\n";
                }
                const auto& rev = m_slots[e.node.value].in;
                auto it = std::find_if(rev.begin(), rev.end(), [&](const Edge& r) { return r.node == u; });
                if (it == rev.end() || it->weight != e.weight)
                {
                    problems << "transpose mismatch for " << i << "->" << e.node.value << "\n";
                }
                const double acc = net_flow(e.node, u);
                if (acc != e.weight)
                {
                    problems << "edge " << i << "->" << e.node.value << " disagrees with accumulator\n";
                }
            }
            for (const Edge& r : s.in)
            {
                if (!contains(r.node) || !edge_weight(r.node, u))
                {
                    problems << "dangling in-edge " << r.node.value << "->" << i << "\n";
                }
            }
            if (std::abs(sum - s.out_weight) > 1e-9 * std::max(1.0, std::abs(sum)))
            {
                problems << "cached out-weight mismatch at " << i << "\n";
            }
        }
        if (edges != m_edge_count)
        {
            problems << "edge count mismatch\n";
        }
        if (m_net_flow.size() != m_edge_count)
        {
            problems << "accumulator count differs from edge count\n";
        }
        return problems.str();
    }

    const InteractionGraph::Slot& InteractionGraph::slot(NodeId u) const
    {
        if (!contains(u))
        {
            throw GraphError("no such node");
        }
        return m_slots[u.value];
    }

    InteractionGraph::Slot& InteractionGraph::slot(NodeId u)
    {
        if (!contains(u))
        {
            throw GraphError("no such node");
        }
        return m_slots[u.value];
    }

    void InteractionGraph::erase_edge(NodeId source, NodeId target)
    {
        auto& out = m_slots[source.value].out;
        out.erase(std::find_if(out.begin(), out.end(), [&](const Edge& e) { return e.node == target; }));
        auto& in = m_slots[target.value].in;
        in.erase(std::find_if(in.begin(), in.end(), [&](const Edge& e) { return e.node == source; }));
        refresh_out_weight(source);
        --m_edge_count;
    }

    void InteractionGraph::insert_edge(NodeId source, NodeId target, double weight)
    {
        m_slots[source.value].out.push_back({target, weight});
        m_slots[target.value].in.push_back({source, weight});
        refresh_out_weight(source);
        ++m_edge_count;
    }

    void InteractionGraph::set_edge_weight(NodeId source, NodeId target, double weight)
    {
        for (Edge& e : m_slots[source.value].out)
        {
            if (e.node == target)
            {
                e.weight = weight;
            }
        }
        for (Edge& e : m_slots[target.value].in)
        {
            if (e.node == source)
            {
                e.weight = weight;
            }
        }
        refresh_out_weight(source);
    }

    // Recomputed from scratch so the cache never drifts under repeated updates.
    void InteractionGraph::refresh_out_weight(NodeId u)
    {
        double sum = 0.0;
        for (const Edge& e : m_slots[u.value].out)
        {
            sum += e.weight;
        }
        m_slots[u.value].out_weight = sum;
    }

    std::uint64_t InteractionGraph::pair_key(NodeId a, NodeId b) noexcept
    {
        return (static_cast<std::uint64_t>(a.value) << 32) | b.value;
    }
}
