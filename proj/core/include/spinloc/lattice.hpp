#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "spinloc/errors.hpp"

namespace spinloc {

enum class MetricKind { Path, Manhattan };

// Finite spin lattice: ordered sites with integer coordinates and a metric.
// Site indices are 0-based internally; config files and reports use 1-based
// site labels matching the coordinate convention of chains [1..L].
struct Lattice {
    std::vector<std::array<int, 2>> sites;  // (x, y); y is 0 on chains
    int dimension = 1;
    MetricKind metric = MetricKind::Path;

    int size() const { return static_cast<int>(sites.size()); }

    int distance(int i, int j) const;
    int diameter() const;
    int coord_to_index(int x, int y) const;  // -1 if absent
};

// A non-empty set of site indices, strictly increasing.
struct Region {
    std::vector<int> site_indices;

    int size() const { return static_cast<int>(site_indices.size()); }
};

// Default cap on |Omega|: the state dimension is 2^{|Omega|}.
inline constexpr int kMaxLatticeSites = 14;

Lattice build_chain(int length);
Lattice build_grid(int rows, int cols);

// Validates indices against the lattice and normalizes ordering.
Region make_region(const Lattice& lat, std::vector<int> site_indices);

int region_distance(const Lattice& lat, const Region& x, const Region& y);

// tau = min over unordered region pairs of region_distance.
// Throws DataError if any two regions share a site.
int min_separation(const Lattice& lat, const std::vector<Region>& regions);

int region_diameter(const Lattice& lat, const Region& x);

}  // namespace spinloc
