#include "walkrank/rank.hpp"

#include "walkrank/csv.hpp"
#include "walkrank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace walkrank
{
    RankVector::RankVector(std::vector<Entry> entries)
        : m_entries(std::move(entries))
    {
        std::sort(m_entries.begin(), m_entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
        auto dup = std::adjacent_find(
            m_entries.begin(),
            m_entries.end(),
            [](const Entry& a, const Entry& b) { return a.first == b.first; }
        );
        if (dup != m_entries.end())
        {
            throw ConfigError("rank vector has duplicate node " + std::to_string(dup->first.value));
        }
    }

    double RankVector::operator[](NodeId u) const
    {
        auto it = std::lower_bound(
            m_entries.begin(),
            m_entries.end(),
            u,
            [](const Entry& e, NodeId id) { return e.first < id; }
        );
        return it != m_entries.end() && it->first == u ? it->second : 0.0;
    }

    double RankVector::sum() const
    {
        double s = 0.0;
        for (const auto& [id, v] : m_entries)
        {
            s += v;
        }
        return s;
    }

    namespace
    {
        // Merge-walk over both sorted entry lists.
        template <typename F>
        void for_each_pair(const RankVector& a, const RankVector& b, F&& f)
        {
            const auto& x = a.entries();
            const auto& y = b.entries();
            std::size_t i = 0;
            std::size_t j = 0;
            while (i < x.size() || j < y.size())
            {
                if (j == y.size() || (i < x.size() && x[i].first < y[j].first))
                {
                    f(x[i++].second, 0.0);
                }
                else if (i == x.size() || y[j].first < x[i].first)
                {
                    f(0.0, y[j++].second);
                }
                else
                {
                    f(x[i++].second, y[j++].second);
                }
            }
        }
    }

    double linf_distance(const RankVector& a, const RankVector& b)
    {
        double m = 0.0;
        for_each_pair(a, b, [&](double p, double q) { m = std::max(m, std::abs(p - q)); });
        return m;
    }

    double l2_distance(const RankVector& a, const RankVector& b)
    {
        double s = 0.0;
        for_each_pair(a, b, [&](double p, double q) { s += (p - q) * (p - q); });
        return std::sqrt(s);
    }

    std::vector<ScoredNode> ordered_ranking(const RankVector& ranks, const InteractionGraph& g)
    {
        std::vector<ScoredNode> out;
        out.reserve(g.node_count());
        for (NodeId u : g.nodes())
        {
            out.push_back({u, g.display_label(u), ranks[u]});
        }
        std::sort(
            out.begin(),
            out.end(),
            [](const ScoredNode& a, const ScoredNode& b)
            {
                if (a.score != b.score)
                {
                    return a.score > b.score;
                }
                return a.label < b.label;
            }
        );
        return out;
    }

    void write_rank_csv(std::ostream& out, const RankVector& ranks, const InteractionGraph& g)
    {
        out << "node_label,score\n";
        for (const auto& s : ordered_ranking(ranks, g))
        {
            out << s.label << ',' << csv::format_double(s.score) << '\n';
        }
    }
}
