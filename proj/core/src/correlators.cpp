#include "spinloc/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace spinloc {

namespace {

void check_disjoint(const ObsList& obs) {
    std::set<int> seen;
    for (const auto& [o, region] : obs) {
        for (int s : region.site_indices)
            if (!seen.insert(s).second)
                throw DataError("expectation: observable regions overlap at site " +
                                std::to_string(s));
        for (int s : o.base.support.site_indices)
            if (!std::binary_search(region.site_indices.begin(), region.site_indices.end(), s))
                throw DataError("expectation: observable support escapes its region");
    }
}

std::vector<int> union_sites(const ObsList& obs, const std::vector<int>& which) {
    std::set<int> u;
    for (int i : which)
        for (int s : obs[size_t(i)].second.site_indices) u.insert(s);
    return {u.begin(), u.end()};
}

double check_residue(cplx value) {
    if (std::abs(value.imag()) >= 1e-8)
        throw DataError("expectation: imaginary residue " + std::to_string(value.imag()) +
                        " indicates a broken hermiticity invariant");
    return value.real();
}

// Expectation of the product of a subset of the observables.
double expectation_subset(const QuantumState& rho, const ObsList& obs,
                          const std::vector<int>& which) {
    const std::vector<int> u = union_sites(obs, which);
    if (int(u.size()) <= kReducedPathCapSites) {
        const Eigen::MatrixXcd red = reduce(rho, Region{u});
        const Eigen::Index d = red.rows();
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(d, d);
        for (int i : which)
            m *= embed_into(obs[size_t(i)].first.base.matrix,
                            obs[size_t(i)].first.base.support.site_indices, u);
        return check_residue((m * red).trace());
    }
    // full-space fallback
    std::vector<int> all(rho.n_sites);
    std::iota(all.begin(), all.end(), 0);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(rho.dim(), rho.dim());
    for (int i : which)
        m *= embed_into(obs[size_t(i)].first.base.matrix,
                        obs[size_t(i)].first.base.support.site_indices, all);
    if (rho.pure) return check_residue(rho.vec.dot(m * rho.vec));
    return check_residue((m * rho.mat).trace());
}

std::vector<int> all_indices(size_t s) {
    std::vector<int> v(s);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

std::vector<int> record_sizes(const ObsList& obs) {
    std::vector<int> sizes;
    sizes.reserve(obs.size());
    for (const auto& [o, region] : obs) sizes.push_back(region.size());
    return sizes;
}

}  // namespace

double expectation(const QuantumState& rho, const ObsList& obs) {
    check_disjoint(obs);
    return expectation_subset(rho, obs, all_indices(obs.size()));
}

double expectation_full_trace(const QuantumState& rho, const ObsList& obs) {
    check_disjoint(obs);
    std::vector<int> all(rho.n_sites);
    std::iota(all.begin(), all.end(), 0);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(rho.dim(), rho.dim());
    for (const auto& [o, region] : obs)
        m *= embed_into(o.base.matrix, o.base.support.site_indices, all);
    cplx value;
    if (rho.pure)
        value = rho.vec.dot(m * rho.vec);
    else
        value = (m * rho.mat).trace();
    if (std::abs(value.imag()) >= 1e-8)
        throw DataError("expectation_full_trace: imaginary residue too large");
    return value.real();
}

DefectRecord defect_sequential(const QuantumState& rho, const ObsList& obs) {
    const int s = int(obs.size());
    if (s < 3) throw DataError("defect_sequential: needs at least 3 observables");
    check_disjoint(obs);
    DefectRecord rec;
    rec.partition = "sequential";
    rec.region_sizes = record_sizes(obs);
    rec.joint = expectation_subset(rho, obs, all_indices(obs.size()));
    double factored = 1.0;
    for (int i = 0; i < s - 2; ++i) factored *= expectation_subset(rho, obs, {i});
    factored *= expectation_subset(rho, obs, {s - 2, s - 1});
    rec.factored = factored;
    rec.defect = std::abs(rec.joint - rec.factored);
    return rec;
}

DefectRecord defect_bipartition(const QuantumState& rho, const ObsList& obs,
                                const std::vector<int>& split) {
    const int s = int(obs.size());
    if (split.empty() || int(split.size()) >= s)
        throw DataError("defect_bipartition: split must be a non-empty proper subset");
    check_disjoint(obs);
    std::vector<char> in_split(s, 0);
    for (int i : split) {
        if (i < 0 || i >= s) throw DataError("defect_bipartition: split index out of range");
        in_split[i] = 1;
    }
    std::vector<int> left, right;
    for (int i = 0; i < s; ++i) (in_split[i] ? left : right).push_back(i);

    DefectRecord rec;
    rec.partition = "bipartition:";
    for (size_t i = 0; i < left.size(); ++i)
        rec.partition += (i ? "," : "") + std::to_string(left[i]);
    rec.region_sizes = record_sizes(obs);
    rec.joint = expectation_subset(rho, obs, all_indices(obs.size()));
    rec.factored = expectation_subset(rho, obs, left) * expectation_subset(rho, obs, right);
    rec.defect = std::abs(rec.joint - rec.factored);
    return rec;
}

ChainBoundReport defect_chain_bound_check(const QuantumState& rho, const ObsList& obs) {
    const int s = int(obs.size());
    if (s < 3) throw DataError("defect_chain_bound_check: needs at least 3 observables");
    check_disjoint(obs);
    ChainBoundReport rep;
    rep.lhs = defect_sequential(rho, obs).defect;
    for (int m = 3; m <= s; ++m) {
        // last m observables: indices s-m .. s-1; one-vs-rest on the first of them
        std::vector<int> tail, head{s - m};
        for (int i = s - m + 1; i < s; ++i) tail.push_back(i);
        std::vector<int> whole{s - m};
        whole.insert(whole.end(), tail.begin(), tail.end());
        const double joint = expectation_subset(rho, obs, whole);
        const double factored =
            expectation_subset(rho, obs, head) * expectation_subset(rho, obs, tail);
        rep.step_defects.push_back(std::abs(joint - factored));
    }
    const double rhs = std::accumulate(rep.step_defects.begin(), rep.step_defects.end(), 0.0);
    rep.holds = rep.lhs <= rhs + 1e-9;
    return rep;
}

}  // namespace spinloc
