#pragma once

#include <span>
#include <vector>

namespace walkrank::stats
{
    double mean(std::span<const double> xs);
    /// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
    double stddev(std::span<const double> xs);
    /// Linear-interpolation quantile between order statistics. Throws on empty input.
    double quantile(std::vector<double> xs, double q);
    double median(std::vector<double> xs);

    /// Ranks 1..n with ties sharing their average rank.
    std::vector<double> average_ranks(std::span<const double> xs);

    struct Correlation
    {
        double rho = 0.0;
        double p_value = 1.0;  // two-sided, t approximation with n - 2 degrees of freedom
    };

    /// Spearman rank correlation. Needs at least three pairs of equal length.
    Correlation spearman(std::span<const double> x, std::span<const double> y);
}
