#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spinloc/states.hpp"

namespace spinloc {

using ObsList = std::vector<std::pair<Observable, Region>>;

struct DefectRecord {
    std::string partition;  // "sequential" or "bipartition:<indices>"
    double joint = 0;
    double factored = 0;
    double defect = 0;
    int tau = -1;  // filled by sweep drivers
    std::vector<int> region_sizes;
};

struct ChainBoundReport {
    bool holds = false;
    double lhs = 0;
    std::vector<double> step_defects;  // one-vs-rest defects D_3..D_s
};

// Regions of the observable sites beyond which the expectation never grows
// cheaper: reduce-then-trace path is used up to this union size.
inline constexpr int kReducedPathCapSites = 8;

// tr((E_1 x ... x E_s x 1_rest) rho) via the reduced density matrix of the
// union support.  Imaginary residue >= 1e-8 is a hard error.
double expectation(const QuantumState& rho, const ObsList& obs);

// Independent route: embeds every observable into the full lattice space.
double expectation_full_trace(const QuantumState& rho, const ObsList& obs);

// |<E_1...E_s> - <E_1>...<E_{s-2}><E_{s-1}E_s>|, s >= 3.
DefectRecord defect_sequential(const QuantumState& rho, const ObsList& obs);

// |<E_1...E_s> - <prod over split><prod over complement>|; split is a
// non-empty proper subset of 0..s-1.
DefectRecord defect_bipartition(const QuantumState& rho, const ObsList& obs,
                                const std::vector<int>& split);

// Telescoping inequality behind the sequential-defect induction:
// lhs <= sum_m D_m + 1e-9 with D_m the one-vs-rest defect of the last m factors.
ChainBoundReport defect_chain_bound_check(const QuantumState& rho, const ObsList& obs);

}  // namespace spinloc
