#pragma once

#include "walkrank/graph.hpp"
#include "walkrank/rank.hpp"

#include <cstddef>

namespace walkrank
{
    /**
     * Reference solvers for personalized PageRank.
     *
     * Convention used throughout the library: `reset_probability` (c) is the
     * per-step stop probability of the walker, so expected walk node count is
     * 1/c. The stationary vector solves
     *
     *     pi(i) = c [i == seed] + (1 - c) sum_j pi(j) P(j, i)
     *
     * where rows of dangling nodes are patched to send all mass back to the
     * seed. That is exactly the visit distribution of a walker that restarts at
     * the seed and terminates at dangling nodes.
     */
    struct PowerIterConfig
    {
        double reset_probability = 0.3;
        double tolerance = 1e-10;  // L1 change between consecutive iterates
        std::size_t max_iterations = 10000;
        NodeId seed;

        void validate() const;
    };

    struct PowerIterResult
    {
        RankVector ranks;
        std::size_t iterations = 0;
        bool converged = false;
    };

    PowerIterResult personalized_power_iteration(const InteractionGraph& g, const PowerIterConfig& cfg);

    /// Largest graph exact_solve accepts.
    inline constexpr std::size_t exact_solve_max_nodes = 2000;

    /// Dense LU solve of the same stationary system. Throws ConfigError past the size guard.
    RankVector exact_solve(const InteractionGraph& g, double reset_probability, NodeId seed);
}
