#include "spinloc/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace spinloc {

namespace {

int lattice_sites_of(const Operator& h) {
    int n = h.lattice_sites;
    if (n <= 0) n = h.support.site_indices.back() + 1;
    return n;
}

void require_hermitian(const Operator& h, const char* who) {
    if (!h.hermitian) throw DataError(std::string(who) + ": operator is not hermitian");
}

// Deterministic global phase: largest-magnitude entry made real positive.
void fix_phase(Eigen::VectorXcd& v) {
    Eigen::Index imax = 0;
    double best = -1;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best + 1e-15) {
            best = a;
            imax = i;
        }
    }
    if (best > 0) v *= std::conj(v[imax]) / std::abs(v[imax]);
}

uint64_t splitmix64(uint64_t& s) {
    uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Lanczos with full reorthogonalization; returns the two lowest Ritz values
// and the ground Ritz vector.
struct LanczosResult {
    double e0 = 0, e1 = 0;
    Eigen::VectorXcd ground;
};

LanczosResult lanczos_lowest_two(const std::vector<PauliTerm>& terms, int n_sites) {
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    const int max_iter = int(std::min<Eigen::Index>(dim, 220));

    std::vector<Eigen::VectorXcd> basis;
    Eigen::VectorXcd v(dim);
    uint64_t seed = 0x5eedULL;
    for (Eigen::Index i = 0; i < dim; ++i) {
        // deterministic pseudo-random start vector
        const double re = double(splitmix64(seed) >> 11) * 0x1.0p-53 - 0.5;
        v[i] = cplx(re, 0);
    }
    v.normalize();
    basis.push_back(v);

    std::vector<double> alpha, beta;
    LanczosResult out;
    double prev_e0 = 0, prev_e1 = 0;
    for (int j = 0; j < max_iter; ++j) {
        Eigen::VectorXcd w = Eigen::VectorXcd::Zero(dim);
        apply_terms(terms, n_sites, basis[j], w);
        const double a = std::real(basis[j].dot(w));
        alpha.push_back(a);
        w -= a * basis[j];
        if (j > 0) w -= beta[j - 1] * basis[j - 1];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) w -= q.dot(w) * q;
        const double b = w.norm();

        const int m = j + 1;
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            tri(i, i) = alpha[i];
            if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        const double e0 = es.eigenvalues()(0);
        const double e1 = m > 1 ? es.eigenvalues()(1) : e0;
        const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        // residual estimate |beta * (last Ritz-vector component)| for the lowest pair
        const double res0 = b * std::abs(es.eigenvectors()(m - 1, 0));
        const double res1 = m > 1 ? b * std::abs(es.eigenvectors()(m - 1, 1)) : res0;
        const bool settled = j > 3 && res0 < 1e-11 * scale && res1 < 1e-9 * scale &&
                             std::abs(e0 - prev_e0) < 1e-13 * scale &&
                             std::abs(e1 - prev_e1) < 1e-11 * scale;
        if (b < 1e-13 || settled || j == max_iter - 1) {
            out.e0 = e0;
            out.e1 = e1;
            Eigen::VectorXcd g = Eigen::VectorXcd::Zero(dim);
            for (int i = 0; i < m; ++i) g += es.eigenvectors()(i, 0) * basis[i];
            g.normalize();
            fix_phase(g);
            out.ground = std::move(g);
            return out;
        }
        prev_e0 = e0;
        prev_e1 = e1;
        beta.push_back(b);
        basis.push_back(w / b);
    }
    throw DataError("lanczos: failed to converge");
}

}  // namespace

Eigen::MatrixXcd full_dense(const Operator& h) {
    const int n = lattice_sites_of(h);
    if (!h.terms.empty()) return assemble_dense(h.terms, n);
    if (h.matrix.size() == 0) throw DataError("full_dense: operator has no representation");
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return embed_into(h.matrix, h.support.site_indices, all);
}

SpectralDecomposition eigendecompose(const Operator& h) {
    require_hermitian(h, "eigendecompose");
    const int n = lattice_sites_of(h);
    if (n > kDenseCapSites)
        throw ResourceError("eigendecompose: " + std::to_string(n) +
                            " sites exceeds the dense cap of " + std::to_string(kDenseCapSites));
    const Eigen::MatrixXcd m = full_dense(h);
    SpectralDecomposition sd;
    sd.n_sites = n;
    if (m.imag().cwiseAbs().maxCoeff() < 1e-14) {
        // real-symmetric fast path (XY chains and real-coupled grids land here)
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real());
        sd.eigenvalues = es.eigenvalues();
        sd.eigenvectors = es.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        sd.eigenvalues = es.eigenvalues();
        sd.eigenvectors = es.eigenvectors();
    }
    return sd;
}

SpectralData spectrum(const Operator& h) {
    require_hermitian(h, "spectrum");
    const int n = lattice_sites_of(h);
    SpectralData out;
    if (n <= kDenseCapSites) {
        const SpectralDecomposition sd = eigendecompose(h);
        out.eigenvalues.assign(sd.eigenvalues.data(), sd.eigenvalues.data() + sd.eigenvalues.size());
        out.full_spectrum = true;
    } else if (n <= kIterativeCapSites) {
        if (h.terms.empty())
            throw ResourceError("spectrum: iterative path requires a Pauli-term representation");
        const LanczosResult lr = lanczos_lowest_two(h.terms, n);
        out.eigenvalues = {lr.e0, lr.e1};
        out.full_spectrum = false;
    } else {
        throw ResourceError("spectrum: " + std::to_string(n) + " sites exceeds the hard cap of " +
                            std::to_string(kIterativeCapSites));
    }
    out.ground_energy = out.eigenvalues[0];
    out.gap = out.eigenvalues.size() > 1 ? out.eigenvalues[1] - out.eigenvalues[0] : 0.0;
    out.degenerate = out.gap < kDegeneracyTol;
    return out;
}

std::pair<QuantumState, SpectralData> ground_state(const Operator& h) {
    require_hermitian(h, "ground_state");
    const int n = lattice_sites_of(h);
    QuantumState st;
    st.pure = true;
    st.n_sites = n;
    SpectralData sp;
    if (n <= 10) {
        const SpectralDecomposition sd = eigendecompose(h);
        sp.eigenvalues.assign(sd.eigenvalues.data(), sd.eigenvalues.data() + sd.eigenvalues.size());
        sp.full_spectrum = true;
        st.vec = sd.eigenvectors.col(0);
        fix_phase(st.vec);
    } else if (n <= kIterativeCapSites) {
        if (h.terms.empty())
            throw ResourceError("ground_state: iterative path requires a Pauli-term representation");
        const LanczosResult lr = lanczos_lowest_two(h.terms, n);
        sp.eigenvalues = {lr.e0, lr.e1};
        sp.full_spectrum = false;
        st.vec = lr.ground;
    } else {
        throw ResourceError("ground_state: " + std::to_string(n) + " sites exceeds the hard cap");
    }
    sp.ground_energy = sp.eigenvalues[0];
    sp.gap = sp.eigenvalues.size() > 1 ? sp.eigenvalues[1] - sp.eigenvalues[0] : 0.0;
    sp.degenerate = sp.gap < kDegeneracyTol;
    return {std::move(st), std::move(sp)};
}

namespace {

QuantumState maximally_mixed(int n_sites) {
    QuantumState st;
    st.pure = false;
    st.n_sites = n_sites;
    const Eigen::Index d = Eigen::Index(1) << n_sites;
    st.mat = Eigen::MatrixXcd::Identity(d, d) / double(d);
    return st;
}

}  // namespace

QuantumState gibbs_state(const SpectralDecomposition& sd, double beta) {
    if (beta < 0) throw ConfigError("gibbs_state: beta must be non-negative");
    if (beta == 0) return maximally_mixed(sd.n_sites);
    const double e0 = sd.eigenvalues(0);
    Eigen::VectorXd w(sd.eigenvalues.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
        w(i) = std::exp(-beta * (sd.eigenvalues(i) - e0));  // shift cancels in normalization
    w /= w.sum();
    QuantumState st;
    st.pure = false;
    st.n_sites = sd.n_sites;
    const Eigen::VectorXd s = w.cwiseSqrt();
    if (sd.eigenvectors.imag().isZero(0.0)) {
        // real eigenbasis: rho = (V sqrt(w)) (V sqrt(w))^T with a real GEMM
        const Eigen::MatrixXd m = sd.eigenvectors.real() * s.asDiagonal();
        st.mat = (m * m.transpose()).cast<cplx>();
    } else {
        const Eigen::MatrixXcd m = sd.eigenvectors * s.asDiagonal();
        st.mat = m * m.adjoint();
    }
    return st;
}

QuantumState gibbs_state(const Operator& h, double beta) {
    if (beta < 0) throw ConfigError("gibbs_state: beta must be non-negative");
    if (beta == 0) return maximally_mixed(lattice_sites_of(h));
    return gibbs_state(eigendecompose(h), beta);
}

QuantumState product_state(const std::vector<Eigen::Matrix2cd>& locals) {
    if (locals.empty()) throw ConfigError("product_state: no local states");
    const int n = int(locals.size());
    if (n > kIterativeCapSites) throw ResourceError("product_state: too many sites");
    bool all_pure = true;
    std::vector<Eigen::Vector2cd> pure_locals(n);
    for (int i = 0; i < n; ++i) {
        const Eigen::Matrix2cd& m = locals[i];
        if (!is_hermitian(m, 1e-10)) throw ConfigError("product_state: local state not hermitian");
        if (std::abs(m.trace().real() - 1.0) > 1e-10 || std::abs(m.trace().imag()) > 1e-10)
            throw ConfigError("product_state: local state trace != 1");
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
        if (es.eigenvalues()(0) < -1e-10) throw ConfigError("product_state: local state not PSD");
        if (es.eigenvalues()(1) > 1.0 - 1e-10) {
            pure_locals[i] = es.eigenvectors().col(1);
            Eigen::VectorXcd tmp = pure_locals[i];
            fix_phase(tmp);
            pure_locals[i] = tmp;
        } else {
            all_pure = false;
        }
    }
    QuantumState st;
    st.n_sites = n;
    if (all_pure) {
        st.pure = true;
        Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXcd next(v.size() * 2);
            for (Eigen::Index a = 0; a < v.size(); ++a)
                for (int b = 0; b < 2; ++b) next[a * 2 + b] = v[a] * pure_locals[i][b];
            v = std::move(next);
        }
        st.vec = std::move(v);
    } else {
        if (n > kDenseCapSites) throw ResourceError("product_state: mixed locals exceed dense cap");
        st.pure = false;
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
        for (int i = 0; i < n; ++i) {
            Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                for (Eigen::Index c = 0; c < m.cols(); ++c)
                    next.block(r * 2, c * 2, 2, 2) = m(r, c) * locals[i];
            m = std::move(next);
        }
        st.mat = std::move(m);
    }
    return st;
}

QuantumState evolve(const QuantumState& rho0, const SpectralDecomposition& sd, double t) {
    if (rho0.n_sites != sd.n_sites) throw DataError("evolve: state/operator size mismatch");
    Eigen::VectorXcd phases(sd.eigenvalues.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases[i] = std::exp(cplx(0, -t * sd.eigenvalues(i)));
    QuantumState st;
    st.pure = rho0.pure;
    st.n_sites = rho0.n_sites;
    if (rho0.pure) {
        st.vec = sd.eigenvectors * (phases.asDiagonal() * (sd.eigenvectors.adjoint() * rho0.vec));
    } else {
        const Eigen::MatrixXcd u = sd.eigenvectors * phases.asDiagonal() * sd.eigenvectors.adjoint();
        st.mat = u * rho0.mat * u.adjoint();
    }
    return st;
}

QuantumState evolve(const QuantumState& rho0, const Operator& h, double t) {
    return evolve(rho0, eigendecompose(h), t);
}

Eigen::MatrixXcd reduce(const QuantumState& rho, const Region& keep) {
    if (keep.site_indices.empty()) throw DataError("reduce: empty keep region");
    const int n = rho.n_sites;
    const int k = keep.size();
    for (int s : keep.site_indices)
        if (s < 0 || s >= n) throw DataError("reduce: keep region out of bounds");
    std::vector<int> rest;
    {
        std::vector<char> kept(n, 0);
        for (int s : keep.site_indices) kept[s] = 1;
        for (int s = 0; s < n; ++s)
            if (!kept[s]) rest.push_back(s);
    }
    const Eigen::Index dk = Eigen::Index(1) << k;
    const Eigen::Index dr = Eigen::Index(1) << rest.size();
    // scatter tables: sub-index -> bits placed at the right full-index positions
    auto scatter = [n](const std::vector<int>& sites) {
        std::vector<Eigen::Index> table(Eigen::Index(1) << sites.size(), 0);
        for (Eigen::Index sub = 0; sub < Eigen::Index(table.size()); ++sub) {
            Eigen::Index full = 0;
            for (size_t i = 0; i < sites.size(); ++i)
                if ((sub >> (sites.size() - 1 - i)) & 1)
                    full |= Eigen::Index(1) << (n - 1 - sites[i]);
            table[sub] = full;
        }
        return table;
    };
    const auto keep_tab = scatter(keep.site_indices);
    const auto rest_tab = scatter(rest);

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
    if (rho.pure) {
        for (Eigen::Index r = 0; r < dr; ++r) {
            const Eigen::Index base = rest_tab[r];
            for (Eigen::Index a = 0; a < dk; ++a) {
                const cplx va = rho.vec[keep_tab[a] | base];
                if (va == cplx(0, 0)) continue;
                for (Eigen::Index b = 0; b < dk; ++b)
                    out(a, b) += va * std::conj(rho.vec[keep_tab[b] | base]);
            }
        }
    } else {
        for (Eigen::Index r = 0; r < dr; ++r) {
            const Eigen::Index base = rest_tab[r];
            for (Eigen::Index a = 0; a < dk; ++a)
                for (Eigen::Index b = 0; b < dk; ++b)
                    out(a, b) += rho.mat(keep_tab[a] | base, keep_tab[b] | base);
        }
    }
    return out;
}

double purity(const QuantumState& rho) {
    if (rho.pure) return 1.0;
    return (rho.mat * rho.mat).trace().real();
}

}  // namespace spinloc
