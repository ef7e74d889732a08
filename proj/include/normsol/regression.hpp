#ifndef NORMSOL_REGRESSION_HPP
#define NORMSOL_REGRESSION_HPP

#include <cstddef>
#include <vector>

namespace normsol {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Least-squares fit of log|y| against log x (entries with y == 0 are skipped).
LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

} // namespace normsol

#endif
