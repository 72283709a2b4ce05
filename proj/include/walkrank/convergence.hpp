#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace walkrank
{
    struct ConvergenceConfig
    {
        std::size_t min_nodes = 15;
        std::size_t max_nodes = 15;
        std::size_t graphs = 1;  // random graphs per node count
        std::size_t out_degree = 2;
        std::vector<std::size_t> walks{10, 100, 300, 500};
        std::vector<double> reset_probabilities{0.1, 0.3, 0.5};
        std::size_t trials = 20;
        std::uint64_t rng_seed = 0;

        void validate() const;
    };

    /// Error of the walk estimate against the reference, aggregated over graphs and trials.
    struct ConvergenceCell
    {
        std::size_t nodes = 0;
        std::size_t walks = 0;
        double reset_probability = 0.0;
        std::size_t samples = 0;
        double linf_median = 0.0;
        double linf_q25 = 0.0;
        double linf_q75 = 0.0;
        double l2_median = 0.0;
        double l2_q25 = 0.0;
        double l2_q75 = 0.0;
    };

    /**
     * For each node count in [min, max], each R and each c, compares `trials`
     * independent corpora per graph against exact_solve (power iteration past
     * its size guard). Graph g of size n is random_graph(n, out_degree) keyed
     * by (rng_seed, n, g); the seed node is handle 0.
     */
    std::vector<ConvergenceCell> convergence_sweep(const ConvergenceConfig& cfg);

    /// CSV `nodes,walks,reset_prob,samples,linf_median,linf_q25,linf_q75,l2_median,l2_q25,l2_q75`.
    void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceCell>& cells);
}
