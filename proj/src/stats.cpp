#include "walkrank/stats.hpp"

#include "walkrank/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace walkrank::stats
{
    double mean(std::span<const double> xs)
    {
        if (xs.empty())
        {
            throw ConfigError("mean of empty sample");
        }
        return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    }

    double stddev(std::span<const double> xs)
    {
        if (xs.size() < 2)
        {
            return 0.0;
        }
        const double m = mean(xs);
        double ss = 0.0;
        for (double x : xs)
        {
            ss += (x - m) * (x - m);
        }
        return std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }

    double quantile(std::vector<double> xs, double q)
    {
        if (xs.empty())
        {
            throw ConfigError("quantile of empty sample");
        }
        std::sort(xs.begin(), xs.end());
        const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(xs.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, xs.size() - 1);
        return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
    }

    double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

    std::vector<double> average_ranks(std::span<const double> xs)
    {
        std::vector<std::size_t> order(xs.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
        std::vector<double> ranks(xs.size());
        for (std::size_t i = 0; i < order.size();)
        {
            std::size_t j = i;
            while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]])
            {
                ++j;
            }
            const double r = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k)
            {
                ranks[order[k]] = r;
            }
            i = j + 1;
        }
        return ranks;
    }

    Correlation spearman(std::span<const double> x, std::span<const double> y)
    {
        if (x.size() != y.size() || x.size() < 3)
        {
            throw ConfigError("spearman needs at least three paired values");
        }
        const auto rx = average_ranks(x);
        const auto ry = average_ranks(y);
        const double mx = mean(rx);
        const double my = mean(ry);
        double sxy = 0.0;
        double sxx = 0.0;
        double syy = 0.0;
        for (std::size_t i = 0; i < rx.size(); ++i)
        {
            sxy += (rx[i] - mx) * (ry[i] - my);
            sxx += (rx[i] - mx) * (rx[i] - mx);
            syy += (ry[i] - my) * (ry[i] - my);
        }
        Correlation out;
        if (sxx == 0.0 || syy == 0.0)
        {
            return out;  // a constant sample carries no rank information
        }
        out.rho = sxy / std::sqrt(sxx * syy);
        const double n = static_cast<double>(x.size());
        if (std::abs(out.rho) >= 1.0)
        {
            out.p_value = 0.0;
            return out;
        }
        const double t = out.rho * std::sqrt((n - 2.0) / (1.0 - out.rho * out.rho));
        const boost::math::students_t dist(n - 2.0);
        out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
        return out;
    }
}
