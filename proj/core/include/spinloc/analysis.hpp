#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spinloc/bell.hpp"

namespace spinloc {

// The gapped-ground-state convention divides the defect by |X| before
// fitting; the thermal convention has no |X| factor and fits the raw defect.
enum class Normalization { PerMaxRegion, Raw };

struct DecayFit {
    double c_est = 0;
    double kappa_est = 0;
    double r_squared = 0;  // on ln-defect residuals
    int points_used = 0;
    int points_excluded = 0;  // at or below the defect floor
    Normalization normalization = Normalization::Raw;
};

struct LightConeFit {
    double v_est = 0;
    double kappa_est = 0;
    double c_est = 0;
    double residual = 0;  // rms over the grid, model vs data
};

inline constexpr double kDefectFloor = 1e-12;

enum class StateFamily { Ground, Gibbs, Evolved };

struct StateSpec {
    StateFamily family = StateFamily::Ground;
    double beta = 0;                             // gibbs
    double t = 0;                                // evolved: certification time
    std::vector<Eigen::Matrix2cd> initial_locals;  // evolved; empty = |0...0>
};

// Canonical leftmost packing: the first region starts at site index 0
// (site 1 in report coordinates); each later region starts tau sites past the
// previous region's last site, so consecutive separations all equal tau.
std::vector<Region> place_regions(const Lattice& lat, int parties, int region_size, int tau);

// Largest tau the lattice can realize for this shape; < 1 means none.
int max_feasible_tau(const Lattice& lat, int parties, int region_size);

struct SweepConfig {
    Lattice lattice;
    Operator hamiltonian;
    StateSpec state;
    int parties = 3;
    int region_size = 1;
    std::vector<int> tau_list;
    std::vector<double> t_list;  // evolved sweeps; ignored otherwise

    // optional Bell value per row (off by default: the see-saw dominates cost)
    bool optimize_bell = false;
    std::optional<BellInequality> inequality;
    OptimizeOptions opt;
};

struct SweepRow {
    int tau = 0;
    double t = 0;
    int s = 0;  // number of regions
    std::string partition;
    double joint = 0;
    double factored = 0;
    double defect = 0;  // max over the per-region Pauli-string menu
    int max_region_size = 0;
    double bell = std::numeric_limits<double>::quiet_NaN();
};

// One row per (tau, t) pair, ordered by (tau, t).  The state is prepared once
// per t; the defect is the sequential defect maximized over assigning each
// region one of the uniform Pauli strings X..X, Y..Y, Z..Z.
std::vector<SweepRow> sweep_separation(const SweepConfig& cfg);

DecayFit fit_decay(const std::vector<std::pair<double, double>>& points, Normalization norm,
                   int max_region = 1);

struct ConePoint {
    double tau = 0;
    double t = 0;
    double defect = 0;
};

// Two-stage fit of c e^{-kappa tau} (e^{kappa v t} - 1): kappa from the
// tau-direction at the largest t, then v by monotone inversion of the
// t-direction growth ratio.
LightConeFit fit_light_cone(const std::vector<ConePoint>& points);

struct EpsilonVariant {
    std::string name;
    double value = 0;
};

struct EpsilonBounds {
    std::vector<EpsilonVariant> variants;
    EpsilonVariant minimal;
};

// Every applicable empirical epsilon for the fitted constants.  Ground fits
// (PerMaxRegion) carry the |X| factor; thermal fits (Raw) do not; variants
// with the light-cone factor require both `cone` and `t`.
EpsilonBounds epsilon_bound(const DecayFit& fit, const std::optional<LightConeFit>& cone,
                            const CoefficientSums& sums, int max_region, double tau,
                            std::optional<double> t = std::nullopt);

// (1/kappa) ln(prefactor c / delta), clamped at zero; kappa <= 0 has no
// finite answer and is a data error.
double tau_star(const DecayFit& fit, double delta, double prefactor);

struct CertifyOptions {
    OptimizeOptions opt;
    double delta = 0.01;  // margin for tau_star
};

struct CertificationReport {
    std::string inequality;
    std::vector<Region> regions;
    int tau = 0;  // min pairwise separation of the certification regions
    std::string state_family;
    double beta = 0;
    double t = 0;
    double delta_loc = 0;
    double bell_value = 0;
    DecayFit fit;
    std::optional<LightConeFit> cone;
    std::vector<EpsilonVariant> epsilon_variants;
    std::string epsilon_variant;  // label of the minimal variant
    double epsilon = 0;
    bool epsilon_local = false;  // bell_value <= delta_loc + epsilon
    bool gap_degenerate = false;   // non-degeneracy hypothesis fails
    bool beta_unscanned = false;   // beta* never estimated for this beta
    double tau_star_value = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    int see_saw_iterations = 0;
    bool see_saw_converged = false;
};

// End-to-end pipeline: prepare the state, sweep cfg.tau_list (and cfg.t_list
// when evolved) to fit the decay constants, see-saw the Bell value on the
// given regions, and compare against delta_loc + epsilon_min.
CertificationReport certify(const SweepConfig& cfg, const BellInequality& ineq,
                            const std::vector<Region>& regions, const CertifyOptions& opts);

// The verdict must be recomputable from the stored fields alone.
bool recompute_verdict(const CertificationReport& rep);

}  // namespace spinloc
