#include "walkrank/convergence.hpp"
#include "walkrank/delta_script.hpp"
#include "walkrank/errors.hpp"
#include "walkrank/parallel.hpp"
#include "walkrank/stats.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <sstream>

using namespace walkrank;

TEST_CASE("quantiles interpolate between order statistics")
{
    CHECK(stats::median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(stats::median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(stats::quantile({0.0, 10.0}, 0.25) == 2.5);
    CHECK_THROWS_AS(stats::median({}), ConfigError);
    const std::vector<double> xs{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
    CHECK(stats::mean(xs) == 5.0);
    CHECK(stats::stddev(xs) == doctest::Approx(std::sqrt(32.0 / 7.0)));
}

TEST_CASE("average ranks share ties")
{
    const std::vector<double> xs{10.0, 20.0, 10.0, 30.0};
    CHECK(stats::average_ranks(xs) == std::vector<double>{1.5, 3.0, 1.5, 4.0});
}

TEST_CASE("spearman correlation")
{
    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const std::vector<double> down{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
    CHECK(stats::spearman(x, x).rho == doctest::Approx(1.0));
    CHECK(stats::spearman(x, down).rho == doctest::Approx(-1.0));
    // Reference values: scipy.stats.spearmanr([1..10], [2,1,4,3,6,5,8,7,10,9]) -> rho 0.9393939, p 5.48e-05.
    const std::vector<double> y{2, 1, 4, 3, 6, 5, 8, 7, 10, 9};
    const auto r = stats::spearman(x, y);
    CHECK(r.rho == doctest::Approx(0.9393939393939394).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(5.484052998513e-05).epsilon(1e-6));
    const std::vector<double> flat(10, 1.0);
    CHECK(stats::spearman(x, flat).p_value == 1.0);
}

TEST_CASE("parallel_for covers every index once, also when nested")
{
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(10, [&](std::size_t i) {
        parallel_for(100, [&](std::size_t j) { hits[i * 100 + j]++; });
    });
    for (auto& h : hits)
    {
        CHECK(h.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(50, [](std::size_t i) {
        if (i == 17)
        {
            throw StateError("boom");
        }
    }), StateError);
}

TEST_CASE("delta scripts")
{
    std::stringstream in("op,node_a,node_b,delta_flow\nadd_node,c,,\nflow,a,c,2.5\nflow,c,b,-1\nremove_node,a,,\n");
    const auto ops = read_delta_ops(in);
    REQUIRE(ops.size() == 4);
    std::stringstream round;
    write_delta_ops(round, ops);
    const auto again = read_delta_ops(round);
    CHECK(again.size() == 4);
    CHECK(again[1].delta_flow == 2.5);

    InteractionGraph g;
    g.add_node("a");
    g.add_node("b");
    CHECK(apply_op(g, ops[0])[0].kind == DeltaKind::NodeAdded);
    const auto d = apply_op(g, ops[1]);
    CHECK(d[0].kind == DeltaKind::EdgeAdded);
    CHECK(g.edge_weight(g.require("c"), g.require("a")) == 2.5);
    apply_op(g, ops[2]);
    CHECK(g.edge_weight(g.require("c"), g.require("b")) == 1.0);
    CHECK(apply_op(g, ops[3]).back().kind == DeltaKind::NodeRemoved);

    std::stringstream empty("op,node_a,node_b,delta_flow\n");
    CHECK(read_delta_ops(empty).empty());
    std::stringstream bad_op("op,node_a,node_b,delta_flow\njump,a,b,1\n");
    CHECK_THROWS_AS(read_delta_ops(bad_op), FormatError);
    std::stringstream bad_cols("op,node_a\nflow,a\n");
    CHECK_THROWS_WITH_AS(read_delta_ops(bad_cols), doctest::Contains("delta_flow"), FormatError);
    DeltaOp unknown{DeltaOp::Kind::Flow, "a", "zz", 1.0};
    CHECK_THROWS_AS(apply_op(g, unknown), GraphError);
}

TEST_CASE("convergence sweep shape")
{
    ConvergenceConfig cfg;
    cfg.min_nodes = 1;
    cfg.max_nodes = 3;
    cfg.walks = {10, 50};
    cfg.reset_probabilities = {0.3};
    cfg.trials = 5;
    const auto cells = convergence_sweep(cfg);
    CHECK(cells.size() == 3 * 2);
    for (const auto& c : cells)
    {
        CHECK(c.samples == 5);
        CHECK(c.linf_q25 <= c.linf_median);
        CHECK(c.linf_median <= c.linf_q75);
        if (c.nodes == 1)
        {
            CHECK(c.linf_median == 0.0);
            CHECK(c.l2_q75 == 0.0);
        }
    }
    std::stringstream out;
    write_convergence_csv(out, cells);
    std::string header;
    std::getline(out, header);
    CHECK(header == "nodes,walks,reset_prob,samples,linf_median,linf_q25,linf_q75,l2_median,l2_q25,l2_q75");
    cfg.walks.clear();
    CHECK_THROWS_AS(convergence_sweep(cfg), ConfigError);
}
