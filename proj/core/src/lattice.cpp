#include "spinloc/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace spinloc {

int Lattice::distance(int i, int j) const {
    const auto& a = sites.at(i);
    const auto& b = sites.at(j);
    return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]);
}

int Lattice::diameter() const {
    int d = 0;
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j) d = std::max(d, distance(i, j));
    return d;
}

int Lattice::coord_to_index(int x, int y) const {
    for (int i = 0; i < size(); ++i)
        if (sites[i][0] == x && sites[i][1] == y) return i;
    return -1;
}

Lattice build_chain(int length) {
    if (length < 1) throw ConfigError("build_chain: length must be >= 1");
    if (length > kMaxLatticeSites)
        throw ResourceError("build_chain: " + std::to_string(length) + " sites exceeds cap of " +
                            std::to_string(kMaxLatticeSites));
    Lattice lat;
    lat.dimension = 1;
    lat.metric = MetricKind::Path;
    lat.sites.reserve(length);
    for (int x = 1; x <= length; ++x) lat.sites.push_back({x, 0});
    return lat;
}

Lattice build_grid(int rows, int cols) {
    if (rows < 1 || cols < 1) throw ConfigError("build_grid: dimensions must be >= 1");
    if (rows * cols > kMaxLatticeSites)
        throw ResourceError("build_grid: " + std::to_string(rows * cols) +
                            " sites exceeds cap of " + std::to_string(kMaxLatticeSites));
    Lattice lat;
    lat.dimension = 2;
    lat.metric = MetricKind::Manhattan;
    lat.sites.reserve(rows * cols);
    // row-major: (1,1), (1,2), ..., (1,cols), (2,1), ...
    for (int r = 1; r <= rows; ++r)
        for (int c = 1; c <= cols; ++c) lat.sites.push_back({r, c});
    return lat;
}

Region make_region(const Lattice& lat, std::vector<int> site_indices) {
    if (site_indices.empty()) throw DataError("region must be non-empty");
    std::sort(site_indices.begin(), site_indices.end());
    for (size_t i = 0; i < site_indices.size(); ++i) {
        int s = site_indices[i];
        if (s < 0 || s >= lat.size())
            throw DataError("region site index " + std::to_string(s) + " out of bounds");
        if (i > 0 && site_indices[i] == site_indices[i - 1])
            throw DataError("region has duplicate site index " + std::to_string(s));
    }
    return Region{std::move(site_indices)};
}

int region_distance(const Lattice& lat, const Region& x, const Region& y) {
    if (x.site_indices.empty() || y.site_indices.empty())
        throw DataError("region_distance: empty region");
    int best = -1;
    for (int a : x.site_indices) {
        if (a < 0 || a >= lat.size()) throw DataError("region_distance: index out of bounds");
        for (int b : y.site_indices) {
            if (b < 0 || b >= lat.size()) throw DataError("region_distance: index out of bounds");
            int d = lat.distance(a, b);
            if (best < 0 || d < best) best = d;
        }
    }
    return best;
}

int min_separation(const Lattice& lat, const std::vector<Region>& regions) {
    if (regions.size() < 2) throw DataError("min_separation: need at least two regions");
    std::vector<char> seen(lat.size(), 0);
    for (const auto& r : regions) {
        for (int s : r.site_indices) {
            if (s < 0 || s >= lat.size()) throw DataError("min_separation: index out of bounds");
            if (seen[s]) throw DataError("regions overlap at site index " + std::to_string(s));
            seen[s] = 1;
        }
    }
    int tau = -1;
    for (size_t i = 0; i < regions.size(); ++i)
        for (size_t j = i + 1; j < regions.size(); ++j) {
            int d = region_distance(lat, regions[i], regions[j]);
            if (tau < 0 || d < tau) tau = d;
        }
    return tau;
}

int region_diameter(const Lattice& lat, const Region& x) {
    int d = 0;
    for (size_t i = 0; i < x.site_indices.size(); ++i)
        for (size_t j = i + 1; j < x.site_indices.size(); ++j)
            d = std::max(d, lat.distance(x.site_indices[i], x.site_indices[j]));
    return d;
}

}  // namespace spinloc
