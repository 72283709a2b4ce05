#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's solvers.

#include "walkrank/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace walkrank::testing
{
    // Row-stochastic transition matrix by handle; dangling rows left zero.
    inline std::vector<std::vector<double>> transition_rows(const InteractionGraph& g)
    {
        const std::size_t n = g.id_bound();
        std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
        for (NodeId u : g.nodes())
        {
            double total = 0.0;
            for (const Edge& e : g.out_edges(u))
            {
                total += e.weight;
            }
            for (const Edge& e : g.out_edges(u))
            {
                p[u.value][e.node.value] = e.weight / total;
            }
        }
        return p;
    }

    /**
     * Expected visit counts of a walker that starts at the seed, continues
     * with probability 1 - c and dies at dangling nodes, summed as the series
     * sum_t e_s ((1 - c) P)^t until the mass left is below `eps`, then
     * normalized. Indexed by handle.
     */
    inline std::vector<double> expected_visit_shares(const InteractionGraph& g, double c, NodeId seed, double eps = 1e-15)
    {
        const auto p = transition_rows(g);
        const std::size_t n = p.size();
        std::vector<double> term(n, 0.0);
        std::vector<double> sum(n, 0.0);
        term[seed.value] = 1.0;
        for (int step = 0; step < 100000; ++step)
        {
            double mass = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                sum[i] += term[i];
                mass += term[i];
            }
            if (mass < eps)
            {
                break;
            }
            std::vector<double> next(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
            {
                if (term[i] == 0.0)
                {
                    continue;
                }
                for (std::size_t j = 0; j < n; ++j)
                {
                    next[j] += term[i] * (1.0 - c) * p[i][j];
                }
            }
            term.swap(next);
        }
        double total = 0.0;
        for (double v : sum)
        {
            total += v;
        }
        for (double& v : sum)
        {
            v /= total;
        }
        return sum;
    }

    /**
     * Global PageRank with uniform teleport: pi = (1 - c) pi P + c / n, with
     * dangling mass spread evenly over all nodes. Plain power iteration over
     * live nodes (assumes handles 0..n-1 are all live).
     */
    inline std::vector<double> global_pagerank(const InteractionGraph& g, double c, int iterations = 2000)
    {
        const auto p = transition_rows(g);
        const std::size_t n = p.size();
        std::vector<double> pi(n, 1.0 / static_cast<double>(n));
        for (int it = 0; it < iterations; ++it)
        {
            std::vector<double> next(n, c / static_cast<double>(n));
            for (std::size_t i = 0; i < n; ++i)
            {
                const bool dangling = g.is_dangling(NodeId(static_cast<NodeId::value_type>(i)));
                for (std::size_t j = 0; j < n; ++j)
                {
                    const double pij = dangling ? 1.0 / static_cast<double>(n) : p[i][j];
                    next[j] += (1.0 - c) * pi[i] * pij;
                }
            }
            pi.swap(next);
        }
        return pi;
    }

    /// Probability that a random honest node outscores a random sybil, ties counting one half.
    inline double pairwise_auroc(const std::vector<double>& honest, const std::vector<double>& sybil)
    {
        double wins = 0.0;
        for (double h : honest)
        {
            for (double s : sybil)
            {
                wins += h > s ? 1.0 : (h == s ? 0.5 : 0.0);
            }
        }
        return wins / (static_cast<double>(honest.size()) * static_cast<double>(sybil.size()));
    }
}
