#include "walkrank/errors.hpp"
#include "walkrank/generators.hpp"
#include "walkrank/graph.hpp"
#include "walkrank/graph_io.hpp"
#include "walkrank/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace walkrank;

TEST_CASE("add_node hands out sequential handles and rejects duplicate labels")
{
    InteractionGraph g;
    const NodeId a = g.add_node("pk_A");
    CHECK(a.value == 0);
    CHECK(g.node_count() == 1);
    CHECK(g.version() == 1);
    CHECK_THROWS_WITH_AS(g.add_node("pk_A"), doctest::Contains("label exists"), GraphError);

    for (int i = 1; i < 289; ++i)
    {
        g.add_node();
    }
    CHECK(g.node_count() == 289);
}

TEST_CASE("upsert_net_flow derives edge direction and kind from the accumulator")
{
    InteractionGraph g;
    const NodeId a = g.add_node("a");
    const NodeId b = g.add_node("b");

    SUBCASE("first interaction adds an edge toward the uploader")
    {
        const GraphDelta d = g.upsert_net_flow(a, b, 5.0);
        CHECK(d.kind == DeltaKind::EdgeAdded);
        CHECK(d.source == b);
        CHECK(d.target == a);
        CHECK(d.new_weight == 5.0);
        CHECK(g.edge_weight(b, a) == 5.0);
        CHECK_FALSE(g.edge_weight(a, b).has_value());
    }
    SUBCASE("cancellation removes the edge")
    {
        g.upsert_net_flow(a, b, 5.0);
        const GraphDelta d = g.upsert_net_flow(a, b, -5.0);
        CHECK(d.kind == DeltaKind::EdgeRemoved);
        CHECK(d.old_weight == 5.0);
        CHECK(g.edge_count() == 0);
        CHECK(g.net_flow(a, b) == 0.0);
    }
    SUBCASE("sign flip reverses with the residual weight")
    {
        g.upsert_net_flow(a, b, 3.0);
        const GraphDelta d = g.upsert_net_flow(a, b, -10.0);
        CHECK(d.kind == DeltaKind::EdgeReversed);
        CHECK(d.source == a);
        CHECK(d.target == b);
        CHECK(d.old_weight == 3.0);
        CHECK(d.new_weight == 7.0);
        CHECK(g.net_flow(a, b) == -7.0);
        CHECK(g.edge_weight(a, b) == 7.0);
        CHECK_FALSE(g.edge_weight(b, a).has_value());
    }
    SUBCASE("same-sign change reweights")
    {
        g.upsert_net_flow(a, b, 3.0);
        const GraphDelta d = g.upsert_net_flow(a, b, 2.0);
        CHECK(d.kind == DeltaKind::EdgeReweighted);
        CHECK(d.old_weight == 3.0);
        CHECK(d.new_weight == 5.0);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_WITH_AS(g.upsert_net_flow(a, a, 1.0), doctest::Contains("self-interaction rejected"), GraphError);
        CHECK_THROWS_WITH_AS(g.upsert_net_flow(a, NodeId(9), 1.0), doctest::Contains("no such node"), GraphError);
    }
    CHECK(g.check_invariants().empty());
}

TEST_CASE("every mutation bumps the version by one")
{
    InteractionGraph g;
    const NodeId a = g.add_node();
    const NodeId b = g.add_node();
    const auto v = g.version();
    g.upsert_net_flow(a, b, 1.0);
    CHECK(g.version() == v + 1);
    g.upsert_net_flow(a, b, 0.0);
    CHECK(g.version() == v + 2);
}

TEST_CASE("remove_node reports incident edges then the node")
{
    InteractionGraph g;
    const NodeId iso = g.add_node("iso");
    auto d = g.remove_node(iso);
    REQUIRE(d.size() == 1);
    CHECK(d[0].kind == DeltaKind::NodeRemoved);
    CHECK_FALSE(g.contains(iso));
    CHECK_THROWS_WITH_AS(g.remove_node(iso), doctest::Contains("no such node"), GraphError);

    const NodeId u = g.add_node("u");
    const NodeId x = g.add_node("x");
    const NodeId y = g.add_node("y");
    const NodeId z = g.add_node("z");
    g.add_directed_weight(x, u, 1.0);
    g.add_directed_weight(y, u, 2.0);
    g.add_directed_weight(u, z, 3.0);
    const auto before = g.version();
    d = g.remove_node(u);
    REQUIRE(d.size() == 4);
    CHECK(std::count_if(d.begin(), d.end(), [](const GraphDelta& e) { return e.kind == DeltaKind::EdgeRemoved; }) == 3);
    CHECK(d.back().kind == DeltaKind::NodeRemoved);
    CHECK(g.version() == before + 4);
    CHECK(g.edge_count() == 0);
    CHECK(g.is_dangling(x));
    CHECK(g.check_invariants().empty());
}

TEST_CASE("out_distribution is proportional to weight")
{
    InteractionGraph g;
    const NodeId u = g.add_node("u");
    const NodeId x = g.add_node("x");
    const NodeId y = g.add_node("y");
    CHECK(g.out_distribution(u).empty());
    g.add_directed_weight(u, x, 3.0);
    g.add_directed_weight(u, y, 1.0);
    const auto dist = g.out_distribution(u);
    REQUIRE(dist.size() == 2);
    for (const auto& t : dist)
    {
        CHECK(t.probability == doctest::Approx(t.target == x ? 0.75 : 0.25).epsilon(1e-15));
    }
    const auto single = g.out_distribution(x);
    CHECK(single.empty());
    g.add_directed_weight(x, y, 10.0);
    REQUIRE(g.out_distribution(x).size() == 1);
    CHECK(g.out_distribution(x)[0].probability == 1.0);
    CHECK_THROWS_WITH_AS(g.out_distribution(NodeId(7)), doctest::Contains("no such node"), GraphError);
}

TEST_CASE("random mutation sequences keep the structural invariants")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        StreamRng rng(seed, 99);
        InteractionGraph g;
        InteractionGraph replay;
        for (int i = 0; i < 12; ++i)
        {
            g.add_node();
            replay.add_node();
        }
        for (int step = 0; step < 300; ++step)
        {
            const NodeId a(static_cast<NodeId::value_type>(rng.below(12)));
            const NodeId b(static_cast<NodeId::value_type>(rng.below(12)));
            if (a == b)
            {
                continue;
            }
            const double delta = std::round((rng.uniform() - 0.5) * 20.0);
            g.upsert_net_flow(a, b, delta);
            replay.upsert_net_flow(a, b, delta);
        }
        REQUIRE(g.check_invariants().empty());
        double sum_weights = 0.0;
        for (NodeId u : g.nodes())
        {
            for (const Edge& e : g.out_edges(u))
            {
                CHECK_FALSE(g.edge_weight(e.node, u).has_value());
                sum_weights += e.weight;
            }
            if (!g.is_dangling(u))
            {
                double p = 0.0;
                for (const auto& t : g.out_distribution(u))
                {
                    p += t.probability;
                }
                CHECK(std::abs(p - 1.0) <= 1e-12);
            }
            CHECK(std::ranges::equal(g.out_edges(u), replay.out_edges(u), [](const Edge& x, const Edge& y) {
                return x.node == y.node && x.weight == y.weight;
            }));
        }
        CHECK(sum_weights == doctest::Approx(g.total_net_flow()).epsilon(1e-12));
    }
}

TEST_CASE("graph CSV round-trips weights exactly and keeps isolated nodes")
{
    InteractionGraph g = random_graph({30, 2, 0.0, 10.0, 5});
    g.add_node("lonely");
    std::stringstream edges;
    std::stringstream nodes;
    write_edge_csv(edges, g);
    write_node_csv(nodes, g);
    const InteractionGraph back = read_graph_csv(edges, &nodes);
    CHECK(back.node_count() == g.node_count());
    CHECK(back.edge_count() == g.edge_count());
    for (NodeId u : g.nodes())
    {
        const NodeId v = back.require(g.display_label(u));
        for (const Edge& e : g.out_edges(u))
        {
            CHECK(back.edge_weight(v, back.require(g.display_label(e.node))) == e.weight);
        }
    }
}

TEST_CASE("graph CSV rejects malformed input")
{
    std::stringstream missing("source_label,weight\na,1\n");
    CHECK_THROWS_WITH_AS(read_graph_csv(missing), doctest::Contains("target_label"), FormatError);
    std::stringstream zero("source_label,target_label,weight\na,b,0\n");
    CHECK_THROWS_AS(read_graph_csv(zero), FormatError);
    std::stringstream twice("source_label,target_label,weight\na,b,1\nb,a,2\n");
    CHECK_THROWS_WITH_AS(read_graph_csv(twice), doctest::Contains("twice"), FormatError);
}

TEST_CASE("random_graph is deterministic with the requested out-degree")
{
    const InteractionGraph g1 = random_graph({50, 2, 0.0, 10.0, 3});
    const InteractionGraph g2 = random_graph({50, 2, 0.0, 10.0, 3});
    CHECK(g1.edge_count() == g2.edge_count());
    CHECK(g1.edge_count() >= 50);
    for (NodeId u : g1.nodes())
    {
        CHECK(g1.display_label(u) == padded_label(u.value, 50));
        for (const Edge& e : g1.out_edges(u))
        {
            CHECK(e.weight > 0.0);
            CHECK(e.weight <= 10.0);
            CHECK(g2.edge_weight(u, e.node) == e.weight);
        }
    }
}
