#pragma once

#include <vector>

namespace ganlab {

/// Median of a copy of the values (average of the middle two for even counts).
double median(std::vector<double> values);

/// Linear-interpolation quantile (the common "type 7" rule), q in [0,1].
double quantile(std::vector<double> values, double q);

double mean(const std::vector<double>& values);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of y against x. With a degenerate response
/// (zero total variance) the flat fit is reported as r_squared = 1.
OlsFit ordinary_least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ganlab
