#include "spinloc/operators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace spinloc {

namespace {

// Applies one Pauli factor to a basis bit: returns the flipped/unchanged bit
// and multiplies phase accordingly.  Bit conventions: |0> = +1 eigenstate of Z.
inline int apply_pauli_bit(Pauli p, int bit, cplx& phase) {
    switch (p) {
        case Pauli::X:
            return 1 - bit;
        case Pauli::Y:
            phase *= bit ? cplx(0, -1) : cplx(0, 1);
            return 1 - bit;
        case Pauli::Z:
            if (bit) phase = -phase;
            return bit;
    }
    return bit;
}

}  // namespace

std::vector<int> PauliTerm::support() const {
    std::vector<int> s;
    s.reserve(factors.size());
    for (const auto& [site, p] : factors) s.push_back(site);
    return s;
}

PauliTerm pauli(Pauli p, int site, cplx coefficient) {
    PauliTerm t;
    t.coefficient = coefficient;
    t.factors[site] = p;
    return t;
}

bool is_hermitian(const Eigen::MatrixXcd& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() < tol;
}

void apply_terms(const std::vector<PauliTerm>& terms, int n_sites,
                 const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    if (x.size() != dim || y.size() != dim)
        throw DataError("apply_terms: dimension mismatch");
    for (const auto& term : terms) {
        for (Eigen::Index col = 0; col < dim; ++col) {
            cplx phase = term.coefficient;
            Eigen::Index row = col;
            for (const auto& [site, p] : term.factors) {
                const int shift = n_sites - 1 - site;  // site 0 is most significant
                const int bit = (col >> shift) & 1;
                const int nb = apply_pauli_bit(p, bit, phase);
                if (nb != bit) row ^= (Eigen::Index(1) << shift);
            }
            y[row] += phase * x[col];
        }
    }
}

Eigen::MatrixXcd assemble_dense(const std::vector<PauliTerm>& terms, int n_sites) {
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& term : terms) {
        for (Eigen::Index col = 0; col < dim; ++col) {
            cplx phase = term.coefficient;
            Eigen::Index row = col;
            for (const auto& [site, p] : term.factors) {
                const int shift = n_sites - 1 - site;
                const int bit = (col >> shift) & 1;
                const int nb = apply_pauli_bit(p, bit, phase);
                if (nb != bit) row ^= (Eigen::Index(1) << shift);
            }
            m(row, col) += phase;
        }
    }
    return m;
}

Operator operator_from_terms(std::vector<PauliTerm> terms) {
    std::erase_if(terms, [](const PauliTerm& t) { return std::abs(t.coefficient) == 0.0; });
    std::set<int> support_set;
    for (const auto& t : terms)
        for (const auto& [site, p] : t.factors) {
            if (site < 0) throw DataError("operator_from_terms: negative site index");
            support_set.insert(site);
        }
    Operator op;
    op.terms = terms;
    if (support_set.empty()) {
        // zero (or scalar) operator; pin a one-site support so the matrix is valid
        op.support = Region{{0}};
    } else {
        op.support = Region{{support_set.begin(), support_set.end()}};
    }
    // remap to support-local sites for the dense block
    std::vector<PauliTerm> local = terms;
    for (auto& t : local) {
        std::map<int, Pauli> remapped;
        for (const auto& [site, p] : t.factors) {
            const auto it = std::lower_bound(op.support.site_indices.begin(),
                                             op.support.site_indices.end(), site);
            remapped[int(it - op.support.site_indices.begin())] = p;
        }
        t.factors = std::move(remapped);
    }
    op.matrix = assemble_dense(local, op.support.size());
    op.hermitian = is_hermitian(op.matrix);
    op.lattice_sites = op.support.site_indices.back() + 1;
    return op;
}

Operator operator_from_dense(Eigen::MatrixXcd matrix, Region support) {
    if (matrix.rows() != matrix.cols()) throw DataError("operator_from_dense: non-square matrix");
    const Eigen::Index expected = Eigen::Index(1) << support.size();
    if (matrix.rows() != expected)
        throw DataError("operator_from_dense: matrix dimension does not match support size");
    Operator op;
    op.support = std::move(support);
    op.hermitian = is_hermitian(matrix);
    op.matrix = std::move(matrix);
    op.lattice_sites = op.support.site_indices.back() + 1;
    return op;
}

Operator xy_chain_hamiltonian(const Lattice& lat, double gamma,
                              const std::vector<double>& fields) {
    if (lat.dimension != 1 || lat.metric != MetricKind::Path)
        throw ConfigError("xy_chain_hamiltonian: lattice is not a chain");
    const int n = lat.size();
    if (int(fields.size()) != n)
        throw ConfigError("xy_chain_hamiltonian: fields length " +
                          std::to_string(fields.size()) + " != " + std::to_string(n) + " sites");
    std::vector<PauliTerm> terms;
    for (int j = 0; j + 1 < n; ++j) {
        PauliTerm xx;
        xx.coefficient = -(1.0 + gamma);
        xx.factors = {{j, Pauli::X}, {j + 1, Pauli::X}};
        terms.push_back(xx);
        PauliTerm yy;
        yy.coefficient = -(1.0 - gamma);
        yy.factors = {{j, Pauli::Y}, {j + 1, Pauli::Y}};
        terms.push_back(yy);
    }
    for (int j = 0; j < n; ++j) terms.push_back(pauli(Pauli::Z, j, fields[j]));
    Operator op = operator_from_terms(std::move(terms));
    op.lattice_sites = n;
    return op;
}

Operator grid_hamiltonian(const Lattice& lat, int k, const Coupling& coupling,
                          const std::vector<double>& fields) {
    if (k < 1) throw ConfigError("grid_hamiltonian: k must be >= 1");
    const int n = lat.size();
    if (int(fields.size()) != n)
        throw ConfigError("grid_hamiltonian: fields length " + std::to_string(fields.size()) +
                          " != " + std::to_string(n) + " sites");
    std::vector<PauliTerm> terms;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            if (lat.distance(a, b) > k) continue;
            auto bond = [&](Pauli p, double j) {
                if (j == 0) return;
                PauliTerm t;
                t.coefficient = j;
                t.factors = {{a, p}, {b, p}};
                terms.push_back(t);
            };
            bond(Pauli::X, coupling.jx);
            bond(Pauli::Y, coupling.jy);
            bond(Pauli::Z, coupling.jz);
        }
    for (int a = 0; a < n; ++a) terms.push_back(pauli(Pauli::Z, a, fields[a]));
    Operator op = operator_from_terms(std::move(terms));
    op.lattice_sites = n;
    op.long_range_warning = (n > 1 && k >= lat.diameter());
    return op;
}

double operator_norm(const Operator& a) {
    if (a.matrix.rows() != a.matrix.cols()) throw DataError("operator_norm: non-square matrix");
    if (a.matrix.size() == 0) throw DataError("operator_norm: empty matrix");
    if (a.hermitian) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.matrix,
                                                           Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a.matrix);
    return svd.singularValues()(0);
}

Observable normalize_observable(const Operator& a) {
    if (!a.hermitian) throw DataError("normalize_observable: operator is not hermitian");
    const double norm = operator_norm(a);
    if (norm == 0.0) throw DataError("normalize_observable: zero operator");
    Observable obs;
    obs.base = a;
    const double scale = std::max(1.0, norm);
    obs.base.matrix /= scale;
    for (auto& t : obs.base.terms) t.coefficient /= scale;
    obs.norm = norm / scale;
    return obs;
}

Eigen::MatrixXcd embed_into(const Eigen::MatrixXcd& op, const std::vector<int>& op_sites,
                            const std::vector<int>& target_sites) {
    const int m = int(target_sites.size());
    const int k = int(op_sites.size());
    if (op.rows() != (Eigen::Index(1) << k))
        throw DataError("embed_into: matrix dimension does not match op_sites");
    // positions of op_sites inside target_sites
    std::vector<int> pos(k);
    for (int i = 0; i < k; ++i) {
        const auto it =
            std::lower_bound(target_sites.begin(), target_sites.end(), op_sites[i]);
        if (it == target_sites.end() || *it != op_sites[i])
            throw DataError("embed_into: op support not contained in target");
        pos[i] = int(it - target_sites.begin());
    }
    const Eigen::Index dim = Eigen::Index(1) << m;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        // sub-index of col on the op's qubits
        Eigen::Index sub = 0;
        for (int i = 0; i < k; ++i) {
            const int bit = int((col >> (m - 1 - pos[i])) & 1);
            sub = (sub << 1) | bit;
        }
        for (Eigen::Index r = 0; r < op.rows(); ++r) {
            const cplx v = op(r, sub);
            if (v == cplx(0, 0)) continue;
            Eigen::Index row = col;
            for (int i = 0; i < k; ++i) {
                const int bit = int((r >> (k - 1 - i)) & 1);
                const int shift = m - 1 - pos[i];
                row = (row & ~(Eigen::Index(1) << shift)) | (Eigen::Index(bit) << shift);
            }
            out(row, col) += v;
        }
    }
    return out;
}

Eigen::MatrixXcd embed(const Operator& a, const Lattice& lat) {
    std::vector<int> all(lat.size());
    for (int i = 0; i < lat.size(); ++i) all[i] = i;
    for (int s : a.support.site_indices)
        if (s >= lat.size()) throw DataError("embed: operator support exceeds lattice");
    return embed_into(a.matrix, a.support.site_indices, all);
}

}  // namespace spinloc
