#pragma once

#include <Eigen/Dense>
#include <vector>

#include "spinloc/operators.hpp"

namespace spinloc {

// Pure vector or density matrix over the full lattice space, canonical
// qubit ordering (site 0 most significant).
struct QuantumState {
    bool pure = true;
    int n_sites = 0;
    Eigen::VectorXcd vec;  // used when pure
    Eigen::MatrixXcd mat;  // used when mixed

    Eigen::Index dim() const { return Eigen::Index(1) << n_sites; }
};

struct SpectralData {
    std::vector<double> eigenvalues;  // ascending; lowest two only on the iterative path
    double ground_energy = 0;
    double gap = 0;  // E1 - E0
    bool degenerate = false;
    bool full_spectrum = true;
};

// Full eigensystem of a hermitian operator on its lattice space.
struct SpectralDecomposition {
    int n_sites = 0;
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXcd eigenvectors;  // columns
};

inline constexpr int kDenseCapSites = 12;      // full decomposition cap (2^12)
inline constexpr int kIterativeCapSites = 14;  // Lanczos ground-state cap
inline constexpr double kDegeneracyTol = 1e-10;

// Dense full-lattice matrix of an operator (terms preferred, else embedding).
Eigen::MatrixXcd full_dense(const Operator& h);

SpectralDecomposition eigendecompose(const Operator& h);

// Full spectrum up to the dense cap; lowest two eigenvalues via Lanczos above it.
SpectralData spectrum(const Operator& h);

std::pair<QuantumState, SpectralData> ground_state(const Operator& h);

QuantumState gibbs_state(const Operator& h, double beta);
QuantumState gibbs_state(const SpectralDecomposition& sd, double beta);

QuantumState product_state(const std::vector<Eigen::Matrix2cd>& locals);

QuantumState evolve(const QuantumState& rho0, const Operator& h, double t);
QuantumState evolve(const QuantumState& rho0, const SpectralDecomposition& sd, double t);

// Partial trace over the complement of `keep`.
Eigen::MatrixXcd reduce(const QuantumState& rho, const Region& keep);

double purity(const QuantumState& rho);

}  // namespace spinloc
