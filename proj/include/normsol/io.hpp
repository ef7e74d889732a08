#ifndef NORMSOL_IO_HPP
#define NORMSOL_IO_HPP

#include "normsol/radial.hpp"

#include <string>

namespace normsol {

// Profile dump format: comment header recording N, p and the grid parameters,
// then "r,u" rows at full precision. Profiles re-load to norms matching the
// recorded values to 1e-12 (the grid is rebuilt from the header).
void write_profile_csv(const std::string& path, const RadialFunction& u, double p);

struct LoadedProfile {
    RadialFunction u;
    double p = 0.0;
};

LoadedProfile read_profile_csv(const std::string& path);

} // namespace normsol

#endif
