#include "walkrank/oracle.hpp"

#include "walkrank/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace walkrank
{
    void PowerIterConfig::validate() const
    {
        if (!(reset_probability > 0.0 && reset_probability < 1.0))
        {
            throw ConfigError("reset probability must lie in (0, 1)");
        }
        if (!(tolerance > 0.0))
        {
            throw ConfigError("tolerance must be positive");
        }
        if (max_iterations < 1)
        {
            throw ConfigError("max_iterations must be at least 1");
        }
    }

    namespace
    {
        // Live nodes packed into 0..n-1.
        struct CompactIndex
        {
            std::vector<NodeId> nodes;
            std::vector<std::size_t> position;  // by handle; npos for removed

            explicit CompactIndex(const InteractionGraph& g)
                : nodes(g.nodes())
                , position(g.id_bound(), static_cast<std::size_t>(-1))
            {
                for (std::size_t i = 0; i < nodes.size(); ++i)
                {
                    position[nodes[i].value] = i;
                }
            }

            std::size_t operator[](NodeId u) const { return position[u.value]; }
        };

        RankVector to_rank_vector(const CompactIndex& index, const std::vector<double>& scores)
        {
            double total = 0.0;
            for (double s : scores)
            {
                total += s;
            }
            std::vector<RankVector::Entry> entries;
            entries.reserve(scores.size());
            for (std::size_t i = 0; i < scores.size(); ++i)
            {
                entries.emplace_back(index.nodes[i], total > 0.0 ? scores[i] / total : 0.0);
            }
            return RankVector(std::move(entries));
        }

        void require_seed(const InteractionGraph& g, NodeId seed)
        {
            if (!g.contains(seed))
            {
                throw ConfigError("seed node does not exist");
            }
        }
    }

    PowerIterResult personalized_power_iteration(const InteractionGraph& g, const PowerIterConfig& cfg)
    {
        cfg.validate();
        require_seed(g, cfg.seed);

        const CompactIndex index(g);
        const std::size_t n = index.nodes.size();
        const std::size_t s = index[cfg.seed];
        const double c = cfg.reset_probability;
        const double keep = 1.0 - c;

        std::vector<double> pi(n, 0.0);
        std::vector<double> next(n, 0.0);
        pi[s] = 1.0;

        PowerIterResult result;
        while (result.iterations < cfg.max_iterations)
        {
            std::fill(next.begin(), next.end(), 0.0);
            double mass = 0.0;
            double dangling = 0.0;
            for (std::size_t j = 0; j < n; ++j)
            {
                const double pj = pi[j];
                mass += pj;
                if (pj == 0.0)
                {
                    continue;
                }
                const NodeId u = index.nodes[j];
                if (g.is_dangling(u))
                {
                    dangling += pj;
                    continue;
                }
                const double scale = keep * pj / g.out_weight(u);
                for (const Edge& e : g.out_edges(u))
                {
                    next[index[e.node]] += scale * e.weight;
                }
            }
            next[s] += c * mass + keep * dangling;

            double change = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                change += std::abs(next[i] - pi[i]);
            }
            pi.swap(next);
            ++result.iterations;
            if (change < cfg.tolerance)
            {
                result.converged = true;
                break;
            }
        }
        result.ranks = to_rank_vector(index, pi);
        return result;
    }

    RankVector exact_solve(const InteractionGraph& g, double reset_probability, NodeId seed)
    {
        if (!(reset_probability > 0.0 && reset_probability < 1.0))
        {
            throw ConfigError("reset probability must lie in (0, 1)");
        }
        require_seed(g, seed);
        if (g.node_count() > exact_solve_max_nodes)
        {
            throw ConfigError("exact solve guard exceeded");
        }

        const CompactIndex index(g);
        const auto n = static_cast<Eigen::Index>(index.nodes.size());
        const auto s = static_cast<Eigen::Index>(index[seed]);
        const double keep = 1.0 - reset_probability;

        // Column form: (I - (1-c) P^T) pi = c e_seed.
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const NodeId u = index.nodes[static_cast<std::size_t>(j)];
            if (g.is_dangling(u))
            {
                a(s, j) -= keep;
                continue;
            }
            const double w = g.out_weight(u);
            for (const Edge& e : g.out_edges(u))
            {
                a(static_cast<Eigen::Index>(index[e.node]), j) -= keep * e.weight / w;
            }
        }
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
        b(s) = reset_probability;
        const Eigen::VectorXd x = a.partialPivLu().solve(b);

        std::vector<double> scores(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i)
        {
            scores[static_cast<std::size_t>(i)] = std::max(0.0, x(i));
        }
        return to_rank_vector(index, scores);
    }
}
