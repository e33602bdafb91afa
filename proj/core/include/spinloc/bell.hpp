#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinloc/correlators.hpp"

namespace spinloc {

// One correlator term: coeff * <E^(p1)_{k1} ... E^(ps)_{ks}>.
struct BellTerm {
    std::vector<int> parties;  // strictly increasing, 0-based
    std::vector<int> inputs;   // same length as parties
    double coeff = 0;
};

struct BellInequality {
    std::string name;
    int n = 0;       // party count
    int inputs = 2;  // inputs per party
    std::vector<BellTerm> terms;
    std::optional<double> delta_loc;  // catalog biseparable bound when known

    double eta() const;            // sum |coeff|
    bool full_correlator() const;  // every term touches all n parties
    void validate() const;
};

struct MeasurementAssignment {
    std::vector<Region> regions;                    // one per party
    std::vector<std::vector<Observable>> settings;  // [party][input]
};

struct BellResult {
    double value = 0;
    MeasurementAssignment assignment;
    int iterations = 0;
    int restarts_used = 0;
    bool converged = false;
    bool identity_tie_break = false;  // a zero effective operator occurred
};

struct OptimizeOptions {
    int restarts = 20;
    std::uint64_t seed = 0;
    int max_iter = 500;
    double tol = 1e-9;
};

struct CoefficientSums {
    double eta = 0;       // sum |psi|
    double gamma = 0;     // sum (s-2)|psi|, s >= 3 strata
    double gamma_hat = 0; // sum |psi|
    double mu = 0;        // sum alpha |psi|, alpha = sum_i prod_{j>=i} |X_j|
    double mu_hat = 0;    // sum xi |psi|, xi = prod |X_j|
};

// Tripartite Svetlichny inequality; biseparable bound 4, quantum max 4*sqrt(2).
BellInequality svetlichny3();

// Seevinck-Svetlichny n-partite family with bound 2^{n-1}; sign selects
// nu_k^+ = (-1)^{k(k+1)/2} or nu_k^- = (-1)^{k(k-1)/2}.
BellInequality seevinck_svetlichny(int n, int sign = +1);

double evaluate(const QuantumState& rho, const BellInequality& ineq,
                const MeasurementAssignment& asg);

BellResult optimize(const QuantumState& rho, const BellInequality& ineq,
                    const std::vector<Region>& regions, const OptimizeOptions& opts = {});

// Exact maximum over deterministic hybrid strategies across all bipartitions.
// Feasible for n <= 4 with 2 inputs / 2 outputs per party.
double biseparable_bound(const BellInequality& ineq);

CoefficientSums coefficient_sums(const BellInequality& ineq,
                                 const std::vector<int>& region_sizes);

// Mixture over bipartitions of random block-product states (the hybrid
// biseparable model on n single-site parties).  Bipartitions are indexed by
// the subsets containing party 0, in increasing bitmask order.
QuantumState random_biseparable_state(int n, const std::vector<double>& weights,
                                      std::uint64_t seed);

int bipartition_count(int n);  // 2^{n-1} - 1

}  // namespace spinloc
