#include "oracles.hpp"

#include "walkrank/errors.hpp"
#include "walkrank/generators.hpp"
#include "walkrank/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace walkrank;

namespace
{
    PowerIterConfig power_cfg(double c, NodeId seed)
    {
        PowerIterConfig cfg;
        cfg.reset_probability = c;
        cfg.seed = seed;
        return cfg;
    }

    double max_abs_diff(const RankVector& r, const std::vector<double>& ref)
    {
        double d = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i)
        {
            d = std::max(d, std::abs(r[NodeId(static_cast<NodeId::value_type>(i))] - ref[i]));
        }
        return d;
    }
}

TEST_CASE("isolated seed concentrates all mass on the seed")
{
    InteractionGraph g;
    const NodeId s = g.add_node("s");
    g.add_node("x");
    const NodeId y = g.add_node("y");
    g.add_directed_weight(NodeId(1), y, 2.0);
    for (double c : {0.1, 0.5, 0.9})
    {
        const auto p = personalized_power_iteration(g, power_cfg(c, s));
        CHECK(p.converged);
        CHECK(p.ranks[s] == 1.0);
        CHECK(p.ranks[y] == 0.0);
        const RankVector e = exact_solve(g, c, s);
        CHECK(e[s] == 1.0);
        CHECK(e[y] == 0.0);
    }
}

TEST_CASE("single node")
{
    InteractionGraph g;
    const NodeId s = g.add_node();
    CHECK(exact_solve(g, 0.3, s)[s] == 1.0);
    CHECK(personalized_power_iteration(g, power_cfg(0.3, s)).ranks[s] == 1.0);
}

TEST_CASE("two-node closed form")
{
    InteractionGraph g;
    const NodeId s = g.add_node("s");
    const NodeId b = g.add_node("b");
    g.add_directed_weight(s, b, 1.0);
    const RankVector e = exact_solve(g, 0.3, s);
    CHECK(e[s] == doctest::Approx(10.0 / 17.0).epsilon(1e-14));
    CHECK(e[b] == doctest::Approx(7.0 / 17.0).epsilon(1e-14));
    const auto p = personalized_power_iteration(g, power_cfg(0.3, s));
    CHECK(p.converged);
    CHECK(linf_distance(p.ranks, e) < 1e-9);
}

TEST_CASE("three-cycle decreases geometrically with hop distance")
{
    InteractionGraph g;
    const NodeId a = g.add_node("a");
    const NodeId b = g.add_node("b");
    const NodeId c = g.add_node("c");
    g.add_directed_weight(a, b, 1.0);
    g.add_directed_weight(b, c, 1.0);
    g.add_directed_weight(c, a, 1.0);
    for (double reset : {0.05, 0.3, 0.7, 0.95})
    {
        const RankVector e = exact_solve(g, reset, a);
        const double q = 1.0 - reset;
        const double z = 1.0 + q + q * q;
        CHECK(e[a] > e[b]);
        CHECK(e[b] > e[c]);
        CHECK(e[a] == doctest::Approx(1.0 / z).epsilon(1e-13));
        CHECK(e[b] == doctest::Approx(q / z).epsilon(1e-13));
        CHECK(e[c] == doctest::Approx(q * q / z).epsilon(1e-13));
    }
}

TEST_CASE("solvers agree with the expected-visit series on random graphs")
{
    for (std::uint64_t seed = 0; seed < 15; ++seed)
    {
        InteractionGraph g = random_graph({10 + seed, 2, 0.0, 10.0, seed});
        // A few dangling nodes.
        g.add_node("d1");
        g.add_directed_weight(NodeId(1), *g.find("d1"), 4.0);
        for (double c : {0.1, 0.3, 0.8})
        {
            const auto series = testing::expected_visit_shares(g, c, NodeId(0));
            const RankVector e = exact_solve(g, c, NodeId(0));
            const auto p = personalized_power_iteration(g, power_cfg(c, NodeId(0)));
            CHECK(p.converged);
            CHECK(max_abs_diff(e, series) < 1e-10);
            CHECK(linf_distance(p.ranks, e) <= 1e-8);
            CHECK(e.sum() == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(p.ranks.sum() == doctest::Approx(1.0).epsilon(1e-9));
            for (const auto& [u, v] : e.entries())
            {
                CHECK(v >= 0.0);
            }
        }
    }
}

TEST_CASE("weights scaled by a constant leave ranks unchanged")
{
    const InteractionGraph g = random_graph({25, 3, 0.0, 10.0, 77});
    InteractionGraph scaled;
    for (NodeId u : g.nodes())
    {
        scaled.add_node(g.display_label(u));
    }
    for (NodeId u : g.nodes())
    {
        for (const Edge& e : g.out_edges(u))
        {
            scaled.add_directed_weight(u, e.node, e.weight * 1024.0);
        }
    }
    CHECK(linf_distance(exact_solve(g, 0.3, NodeId(0)), exact_solve(scaled, 0.3, NodeId(0))) <= 1e-12);
    CHECK(
        linf_distance(
            personalized_power_iteration(g, power_cfg(0.3, NodeId(0))).ranks,
            personalized_power_iteration(scaled, power_cfg(0.3, NodeId(0))).ranks
        )
        <= 1e-12
    );
}

TEST_CASE("seed score grows with c")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const InteractionGraph g = random_graph({20, 2, 0.0, 10.0, 100 + seed});
        double prev = 0.0;
        for (int i = 1; i <= 9; ++i)
        {
            const double s = exact_solve(g, i / 10.0, NodeId(0))[NodeId(0)];
            CHECK(s >= prev - 1e-12);
            prev = s;
        }
    }
}

TEST_CASE("seed is the maximum on an out-tree")
{
    InteractionGraph g;
    g.add_node("root");
    for (int i = 1; i < 31; ++i)
    {
        g.add_node();
        g.add_directed_weight(NodeId(static_cast<NodeId::value_type>((i - 1) / 2)), NodeId(static_cast<NodeId::value_type>(i)), i);
    }
    const RankVector e = exact_solve(g, 0.2, NodeId(0));
    for (const auto& [u, v] : e.entries())
    {
        CHECK(v <= e[NodeId(0)]);
    }
}

TEST_CASE("global fixture: uniform teleport on a symmetric cycle is uniform")
{
    InteractionGraph g;
    for (int i = 0; i < 6; ++i)
    {
        g.add_node();
    }
    for (int i = 0; i < 6; ++i)
    {
        g.add_directed_weight(NodeId(static_cast<NodeId::value_type>(i)), NodeId(static_cast<NodeId::value_type>((i + 1) % 6)), 2.0);
    }
    for (double v : testing::global_pagerank(g, 0.15))
    {
        CHECK(v == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    }
    // A star into a hub ranks the hub highest.
    InteractionGraph star;
    for (int i = 0; i < 5; ++i)
    {
        star.add_node();
    }
    for (int i = 1; i < 5; ++i)
    {
        star.add_directed_weight(NodeId(static_cast<NodeId::value_type>(i)), NodeId(0), 1.0);
    }
    const auto pr = testing::global_pagerank(star, 0.15);
    for (int i = 1; i < 5; ++i)
    {
        CHECK(pr[0] > pr[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("configuration errors")
{
    InteractionGraph g;
    const NodeId s = g.add_node();
    CHECK_THROWS_AS(personalized_power_iteration(g, power_cfg(0.0, s)), ConfigError);
    CHECK_THROWS_AS(personalized_power_iteration(g, power_cfg(1.0, s)), ConfigError);
    CHECK_THROWS_AS(personalized_power_iteration(g, power_cfg(0.3, NodeId(4))), ConfigError);
    PowerIterConfig few = power_cfg(0.01, s);
    few.max_iterations = 0;
    CHECK_THROWS_AS(personalized_power_iteration(g, few), ConfigError);

    InteractionGraph big;
    for (std::size_t i = 0; i <= exact_solve_max_nodes; ++i)
    {
        big.add_node();
    }
    CHECK_THROWS_WITH_AS(exact_solve(big, 0.3, NodeId(0)), doctest::Contains("exact solve guard exceeded"), ConfigError);
}

TEST_CASE("non-convergence is flagged")
{
    const InteractionGraph g = random_graph({40, 3, 0.0, 10.0, 1});
    PowerIterConfig cfg = power_cfg(0.05, NodeId(0));
    cfg.max_iterations = 2;
    const auto r = personalized_power_iteration(g, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 2);
}
