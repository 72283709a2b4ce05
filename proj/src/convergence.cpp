#include "walkrank/convergence.hpp"

#include "walkrank/csv.hpp"
#include "walkrank/errors.hpp"
#include "walkrank/generators.hpp"
#include "walkrank/oracle.hpp"
#include "walkrank/parallel.hpp"
#include "walkrank/rng.hpp"
#include "walkrank/stats.hpp"
#include "walkrank/walks.hpp"

#include <ostream>

namespace walkrank
{
    void ConvergenceConfig::validate() const
    {
        if (min_nodes < 1 || max_nodes < min_nodes)
        {
            throw ConfigError("node range must satisfy 1 <= min <= max");
        }
        if (graphs < 1 || trials < 1)
        {
            throw ConfigError("graphs and trials must be positive");
        }
        if (walks.empty() || reset_probabilities.empty())
        {
            throw ConfigError("walk and reset lists must be non-empty");
        }
        for (std::size_t r : walks)
        {
            if (r < 1)
            {
                throw ConfigError("walk counts must be positive");
            }
        }
        for (double c : reset_probabilities)
        {
            if (!(c > 0.0 && c < 1.0))
            {
                throw ConfigError("reset probabilities must lie in (0, 1)");
            }
        }
    }

    namespace
    {
        RankVector reference(const InteractionGraph& g, double c, NodeId seed)
        {
            if (g.node_count() <= exact_solve_max_nodes)
            {
                return exact_solve(g, c, seed);
            }
            PowerIterConfig pc;
            pc.reset_probability = c;
            pc.seed = seed;
            return personalized_power_iteration(g, pc).ranks;
        }
    }

    std::vector<ConvergenceCell> convergence_sweep(const ConvergenceConfig& cfg)
    {
        cfg.validate();
        const NodeId seed(0);
        std::vector<ConvergenceCell> cells;
        for (std::size_t n = cfg.min_nodes; n <= cfg.max_nodes; ++n)
        {
            std::vector<InteractionGraph> graphs;
            for (std::size_t gi = 0; gi < cfg.graphs; ++gi)
            {
                graphs.push_back(random_graph({n, cfg.out_degree, 0.0, 10.0, derive_key(cfg.rng_seed, n, gi)}));
            }
            for (double c : cfg.reset_probabilities)
            {
                std::vector<RankVector> exact;
                for (const auto& g : graphs)
                {
                    exact.push_back(reference(g, c, seed));
                }
                for (std::size_t r : cfg.walks)
                {
                    const std::size_t samples = cfg.graphs * cfg.trials;
                    std::vector<double> linf(samples);
                    std::vector<double> l2(samples);
                    parallel_for(
                        samples,
                        [&](std::size_t s)
                        {
                            const std::size_t gi = s / cfg.trials;
                            const WalkConfig wc{r, c, derive_key(cfg.rng_seed, n, gi, s % cfg.trials), seed};
                            const RankVector est = rank(sample_corpus(graphs[gi], wc), graphs[gi]);
                            linf[s] = linf_distance(est, exact[gi]);
                            l2[s] = l2_distance(est, exact[gi]);
                        }
                    );
                    ConvergenceCell cell;
                    cell.nodes = n;
                    cell.walks = r;
                    cell.reset_probability = c;
                    cell.samples = samples;
                    cell.linf_median = stats::median(linf);
                    cell.linf_q25 = stats::quantile(linf, 0.25);
                    cell.linf_q75 = stats::quantile(linf, 0.75);
                    cell.l2_median = stats::median(l2);
                    cell.l2_q25 = stats::quantile(l2, 0.25);
                    cell.l2_q75 = stats::quantile(l2, 0.75);
                    cells.push_back(cell);
                }
            }
        }
        return cells;
    }

    void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceCell>& cells)
    {
        using csv::format_double;
        out << "nodes,walks,reset_prob,samples,linf_median,linf_q25,linf_q75,l2_median,l2_q25,l2_q75\n";
        for (const auto& c : cells)
        {
            out << c.nodes << ',' << c.walks << ',' << format_double(c.reset_probability) << ',' << c.samples << ','
                << format_double(c.linf_median) << ',' << format_double(c.linf_q25) << ','
                << format_double(c.linf_q75) << ',' << format_double(c.l2_median) << ','
                << format_double(c.l2_q25) << ',' << format_double(c.l2_q75) << '\n';
        }
    }
}
