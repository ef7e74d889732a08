#include "normsol/io.hpp"
#include "normsol/errors.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace normsol {

namespace {
std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
} // namespace

void write_profile_csv(const std::string& path, const RadialFunction& u, double p) {
    const RadialGrid& g = *u.grid;
    std::ofstream out(path);
    if (!out) throw numerical_error("write_profile_csv: cannot open " + path);
    out << "# normsol profile v1 N=" << g.N << " p=" << fmt17(p)
        << " M=" << g.cells() << " R_max=" << fmt17(g.R_max)
        << " kappa=" << fmt17(g.kappa) << "\n";
    out << "r,u\n";
    for (int i = 0; i < g.nodes(); ++i)
        out << fmt17(g.r[i]) << "," << fmt17(u.values[i]) << "\n";
}

LoadedProfile read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw numerical_error("read_profile_csv: cannot open " + path);
    std::string header;
    std::getline(in, header);
    int N = 0, M = 0;
    double p = 0.0, R_max = 0.0, kappa = 0.0;
    if (std::sscanf(header.c_str(), "# normsol profile v1 N=%d p=%lf M=%d R_max=%lf kappa=%lf",
                    &N, &p, &M, &R_max, &kappa) != 5)
        throw numerical_error("read_profile_csv: bad header in " + path);
    std::string cols;
    std::getline(in, cols);
    LoadedProfile out;
    auto grid = RadialGrid::geometric(N, M, R_max, kappa);
    out.u = RadialFunction(grid);
    out.p = p;
    std::string line;
    int i = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const char* comma = std::strchr(line.c_str(), ',');
        if (!comma || i >= grid->nodes())
            throw numerical_error("read_profile_csv: malformed row in " + path);
        out.u.values[i] = std::strtod(comma + 1, nullptr);
        ++i;
    }
    if (i != grid->nodes())
        throw numerical_error("read_profile_csv: row count mismatch in " + path);
    return out;
}

} // namespace normsol
