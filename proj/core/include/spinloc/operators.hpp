#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

#include "spinloc/lattice.hpp"

namespace spinloc {

using cplx = std::complex<double>;

enum class Pauli : char { X = 'X', Y = 'Y', Z = 'Z' };

// coefficient * product of single-site Paulis; identity on unmapped sites.
struct PauliTerm {
    cplx coefficient{1.0, 0.0};
    std::map<int, Pauli> factors;  // site index -> Pauli

    std::vector<int> support() const;
};

// Operator over a support region. The dense matrix lives on the support
// space only (dimension 2^{|support|}); embed() extends to the full lattice.
// Canonical qubit ordering: the lowest site index is the most significant
// tensor factor everywhere.
struct Operator {
    std::vector<PauliTerm> terms;  // may be empty for dense-only operators
    Region support;                // smallest region outside which it is identity
    Eigen::MatrixXcd matrix;       // dense on the support space
    bool hermitian = false;
    bool long_range_warning = false;  // set when interaction range spans the lattice
    int lattice_sites = 0;            // full lattice size for state preparation

    Eigen::Index dim() const { return matrix.rows(); }
};

Operator operator_from_terms(std::vector<PauliTerm> terms);
Operator operator_from_dense(Eigen::MatrixXcd matrix, Region support);

// Example-1 family: H = sum_j [-(1+gamma) X_j X_{j+1} - (1-gamma) Y_j Y_{j+1}]
//                      + sum_j c_j Z_j.  gamma = 0 is the isotropic chain.
Operator xy_chain_hamiltonian(const Lattice& lat, double gamma,
                              const std::vector<double>& fields);

// k-neighbor grid family: pair coupling (Jx XX + Jy YY + Jz ZZ) for all site
// pairs at metric distance <= k, plus local Z fields.
struct Coupling {
    double jx = 0, jy = 0, jz = 0;
};
Operator grid_hamiltonian(const Lattice& lat, int k, const Coupling& coupling,
                          const std::vector<double>& fields);

double operator_norm(const Operator& a);

struct Observable {
    Operator base;  // hermitian, norm <= 1 after normalization
    double norm = 0;
};

// A / max(1, ||A||); throws on the zero operator.
Observable normalize_observable(const Operator& a);

// Tensor-extends A by identity on all lattice sites outside its support.
Eigen::MatrixXcd embed(const Operator& a, const Lattice& lat);

// Extends op (acting on op_sites) by identity onto the space of target_sites.
// op_sites must be a subset of target_sites; both strictly increasing.
Eigen::MatrixXcd embed_into(const Eigen::MatrixXcd& op, const std::vector<int>& op_sites,
                            const std::vector<int>& target_sites);

// y += H x for a Pauli-term sum acting on n_sites qubits (matrix-free path).
void apply_terms(const std::vector<PauliTerm>& terms, int n_sites,
                 const Eigen::VectorXcd& x, Eigen::VectorXcd& y);

// Dense matrix of a term sum on the full n_sites space.
Eigen::MatrixXcd assemble_dense(const std::vector<PauliTerm>& terms, int n_sites);

bool is_hermitian(const Eigen::MatrixXcd& m, double tol = 1e-10);

// Convenience single-Pauli constructors.
PauliTerm pauli(Pauli p, int site, cplx coefficient = 1.0);

}  // namespace spinloc
