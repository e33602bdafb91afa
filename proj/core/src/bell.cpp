#include "spinloc/bell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace spinloc {

namespace {

uint64_t splitmix64(uint64_t& s) {
    uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Partial trace of an arbitrary matrix living on `space` (sorted site list)
// down to `keep` (subset of space).
Eigen::MatrixXcd partial_trace_matrix(const Eigen::MatrixXcd& m, const std::vector<int>& space,
                                      const std::vector<int>& keep) {
    const int ns = int(space.size());
    std::vector<int> keep_pos, rest_pos;
    for (int i = 0; i < ns; ++i) {
        if (std::binary_search(keep.begin(), keep.end(), space[i]))
            keep_pos.push_back(i);
        else
            rest_pos.push_back(i);
    }
    auto scatter = [ns](const std::vector<int>& pos) {
        std::vector<Eigen::Index> t(Eigen::Index(1) << pos.size(), 0);
        for (Eigen::Index sub = 0; sub < Eigen::Index(t.size()); ++sub) {
            Eigen::Index full = 0;
            for (size_t i = 0; i < pos.size(); ++i)
                if ((sub >> (pos.size() - 1 - i)) & 1) full |= Eigen::Index(1) << (ns - 1 - pos[i]);
            t[sub] = full;
        }
        return t;
    };
    const auto kt = scatter(keep_pos);
    const auto rt = scatter(rest_pos);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(kt.size(), kt.size());
    for (Eigen::Index r = 0; r < Eigen::Index(rt.size()); ++r)
        for (Eigen::Index a = 0; a < Eigen::Index(kt.size()); ++a)
            for (Eigen::Index b = 0; b < Eigen::Index(kt.size()); ++b)
                out(a, b) += m(kt[a] | rt[r], kt[b] | rt[r]);
    return out;
}

// Single-site parties range over Bloch dichotomic observables n.sigma; the
// exact update maximizes tr(G n.sigma) = n.g, so n = g/|g|.  A vanishing g
// leaves the input free and falls back to sigma_z (flagged by the caller).
Eigen::MatrixXcd bloch_observable(const Eigen::Vector3d& n) {
    Eigen::MatrixXcd e(2, 2);
    e(0, 0) = n.z();
    e(1, 1) = -n.z();
    e(0, 1) = cplx(n.x(), -n.y());
    e(1, 0) = cplx(n.x(), n.y());
    return e;
}

Eigen::Vector3d bloch_vector(const Eigen::MatrixXcd& g) {
    const Eigen::MatrixXcd gh = 0.5 * (g + g.adjoint());
    return {gh(0, 1).real() + gh(1, 0).real(), (gh(1, 0) - gh(0, 1)).imag(),
            gh(0, 0).real() - gh(1, 1).real()};
}

// Exact per-coordinate maximizer of tr(E G) over hermitian ||E|| <= 1:
// the sign of the hermitian part of G, zero eigenvalues mapped to +1.
Eigen::MatrixXcd sign_of(const Eigen::MatrixXcd& g) {
    const Eigen::MatrixXcd gh = 0.5 * (g + g.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gh);
    Eigen::VectorXd s(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = es.eigenvalues()(i) >= 0 ? 1.0 : -1.0;
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

struct SeesawWorkspace {
    std::vector<int> space;                // union of all party sites, sorted
    Eigen::MatrixXcd rho;                  // reduced state on the union
    std::vector<std::vector<int>> sites;   // per-party global sites
    std::vector<Eigen::Index> party_dim;   // 2^{|region|}
};

Eigen::MatrixXcd embed_party(const SeesawWorkspace& ws, int party, const Eigen::MatrixXcd& e) {
    return embed_into(e, ws.sites[size_t(party)], ws.space);
}

double bell_value_reduced(const SeesawWorkspace& ws, const BellInequality& ineq,
                          const std::vector<std::vector<Eigen::MatrixXcd>>& settings) {
    double value = 0;
    const Eigen::Index d = ws.rho.rows();
    for (const auto& term : ineq.terms) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(d, d);
        for (size_t j = 0; j < term.parties.size(); ++j)
            m *= embed_party(ws, term.parties[j],
                             settings[size_t(term.parties[j])][size_t(term.inputs[j])]);
        value += term.coeff * (m * ws.rho).trace().real();
    }
    return value;
}

}  // namespace

double BellInequality::eta() const {
    double e = 0;
    for (const auto& t : terms) e += std::abs(t.coeff);
    return e;
}

bool BellInequality::full_correlator() const {
    for (const auto& t : terms)
        if (int(t.parties.size()) != n) return false;
    return true;
}

void BellInequality::validate() const {
    if (n < 1) throw ConfigError("inequality: party count must be >= 1");
    if (inputs < 1) throw ConfigError("inequality: input count must be >= 1");
    for (const auto& t : terms) {
        if (t.parties.empty() || t.parties.size() != t.inputs.size())
            throw ConfigError("inequality: malformed term");
        for (size_t i = 0; i < t.parties.size(); ++i) {
            if (t.parties[i] < 0 || t.parties[i] >= n)
                throw ConfigError("inequality: party index out of range");
            if (i > 0 && t.parties[i] <= t.parties[i - 1])
                throw ConfigError("inequality: term parties must be strictly increasing");
            if (t.inputs[i] < 0 || t.inputs[i] >= inputs)
                throw ConfigError("inequality: input index out of range");
        }
    }
}

BellInequality svetlichny3() {
    BellInequality ineq;
    ineq.name = "svetlichny3";
    ineq.n = 3;
    ineq.inputs = 2;
    ineq.delta_loc = 4.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                const int t = a + b + c;
                BellTerm term;
                term.parties = {0, 1, 2};
                term.inputs = {a, b, c};
                term.coeff = (t <= 1) ? 1.0 : -1.0;
                ineq.terms.push_back(term);
            }
    return ineq;
}

BellInequality seevinck_svetlichny(int n, int sign) {
    if (n < 3) throw ConfigError("seevinck_svetlichny: need n >= 3 parties");
    if (sign != 1 && sign != -1) throw ConfigError("seevinck_svetlichny: sign must be +-1");
    BellInequality ineq;
    ineq.name = "seevinck_svetlichny" + std::to_string(n) + (sign > 0 ? "+" : "-");
    ineq.n = n;
    ineq.inputs = 2;
    ineq.delta_loc = std::pow(2.0, n - 1);
    for (int mask = 0; mask < (1 << n); ++mask) {
        int t = 0;
        BellTerm term;
        for (int p = 0; p < n; ++p) {
            const int k = (mask >> p) & 1;
            t += k;
            term.parties.push_back(p);
            term.inputs.push_back(k);
        }
        const long long ex = sign > 0 ? (long long)t * (t + 1) / 2 : (long long)t * (t - 1) / 2;
        term.coeff = (ex % 2 == 0) ? 1.0 : -1.0;
        ineq.terms.push_back(term);
    }
    return ineq;
}

double evaluate(const QuantumState& rho, const BellInequality& ineq,
                const MeasurementAssignment& asg) {
    ineq.validate();
    if (int(asg.regions.size()) != ineq.n || int(asg.settings.size()) != ineq.n)
        throw ConfigError("evaluate: assignment does not match inequality arity");
    {
        std::set<int> seen;
        for (const auto& r : asg.regions)
            for (int s : r.site_indices)
                if (!seen.insert(s).second)
                    throw DataError("evaluate: party regions overlap");
    }
    double value = 0;
    for (const auto& term : ineq.terms) {
        ObsList obs;
        for (size_t j = 0; j < term.parties.size(); ++j) {
            const int p = term.parties[j];
            obs.emplace_back(asg.settings[size_t(p)][size_t(term.inputs[j])],
                             asg.regions[size_t(p)]);
        }
        value += term.coeff * expectation(rho, obs);
    }
    return value;
}

BellResult optimize(const QuantumState& rho, const BellInequality& ineq,
                    const std::vector<Region>& regions, const OptimizeOptions& opts) {
    ineq.validate();
    if (int(regions.size()) != ineq.n)
        throw ConfigError("optimize: region count does not match party count");
    std::set<int> union_set;
    for (const auto& r : regions) {
        if (r.site_indices.empty()) throw ConfigError("optimize: empty party region");
        for (int s : r.site_indices)
            if (!union_set.insert(s).second) throw DataError("optimize: party regions overlap");
    }
    SeesawWorkspace ws;
    ws.space.assign(union_set.begin(), union_set.end());
    if (int(ws.space.size()) > 12)
        throw ResourceError("optimize: union of regions exceeds 12 sites");
    ws.rho = reduce(rho, Region{ws.space});
    for (const auto& r : regions) {
        ws.sites.push_back(r.site_indices);
        ws.party_dim.push_back(Eigen::Index(1) << r.size());
    }

    // terms grouped by (party, input) for the effective-operator sums
    BellResult best;
    best.value = -std::numeric_limits<double>::infinity();
    uint64_t master = opts.seed;

    for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
        uint64_t sub = splitmix64(master);
        std::mt19937_64 rng(sub);
        std::normal_distribution<double> gauss(0.0, 1.0);

        std::vector<std::vector<Eigen::MatrixXcd>> settings(size_t(ineq.n));
        for (int p = 0; p < ineq.n; ++p) {
            for (int k = 0; k < ineq.inputs; ++k) {
                const Eigen::Index d = ws.party_dim[size_t(p)];
                if (d == 2) {
                    Eigen::Vector3d n(gauss(rng), gauss(rng), gauss(rng));
                    if (n.norm() < 1e-12) n = Eigen::Vector3d::UnitZ();
                    settings[size_t(p)].push_back(bloch_observable(n.normalized()));
                    continue;
                }
                Eigen::MatrixXcd g(d, d);
                for (Eigen::Index r = 0; r < d; ++r)
                    for (Eigen::Index c = 0; c < d; ++c) g(r, c) = cplx(gauss(rng), gauss(rng));
                settings[size_t(p)].push_back(sign_of(g));
            }
        }

        double value = bell_value_reduced(ws, ineq, settings);
        bool identity_tb = false;
        int iter = 0;
        bool converged = false;
        for (; iter < opts.max_iter; ++iter) {
            for (int p = 0; p < ineq.n; ++p) {
                const Eigen::Index dp = ws.party_dim[size_t(p)];
                bool any_nonzero = false;
                std::vector<Eigen::MatrixXcd> effective(
                    size_t(ineq.inputs), Eigen::MatrixXcd::Zero(dp, dp));
                for (const auto& term : ineq.terms) {
                    int my_input = -1;
                    Eigen::MatrixXcd m = ws.rho;
                    for (size_t j = 0; j < term.parties.size(); ++j) {
                        const int q = term.parties[j];
                        if (q == p) {
                            my_input = term.inputs[j];
                            continue;
                        }
                        m = embed_party(ws, q, settings[size_t(q)][size_t(term.inputs[j])]) * m;
                    }
                    if (my_input < 0) continue;  // constant w.r.t. this party
                    effective[size_t(my_input)] +=
                        term.coeff * partial_trace_matrix(m, ws.space, ws.sites[size_t(p)]);
                }
                for (int k = 0; k < ineq.inputs; ++k) {
                    if (dp == 2) {
                        const Eigen::Vector3d n = bloch_vector(effective[size_t(k)]);
                        if (n.norm() < 1e-14) {
                            settings[size_t(p)][size_t(k)] = bloch_observable(
                                Eigen::Vector3d::UnitZ());
                            identity_tb = true;
                        } else {
                            settings[size_t(p)][size_t(k)] = bloch_observable(n.normalized());
                            any_nonzero = true;
                        }
                        continue;
                    }
                    if (effective[size_t(k)].cwiseAbs().maxCoeff() < 1e-14) {
                        settings[size_t(p)][size_t(k)] = Eigen::MatrixXcd::Identity(dp, dp);
                        identity_tb = true;
                    } else {
                        settings[size_t(p)][size_t(k)] = sign_of(effective[size_t(k)]);
                        any_nonzero = true;
                    }
                }
                (void)any_nonzero;
            }
            const double next = bell_value_reduced(ws, ineq, settings);
            if (next - value < opts.tol) {
                value = std::max(value, next);
                converged = true;
                ++iter;
                break;
            }
            value = next;
        }

        if (value > best.value) {
            best.value = value;
            best.iterations = iter;
            best.restarts_used = restart + 1;
            best.converged = converged;
            best.identity_tie_break = identity_tb;
            MeasurementAssignment asg;
            asg.regions = regions;
            asg.settings.resize(size_t(ineq.n));
            for (int p = 0; p < ineq.n; ++p)
                for (int k = 0; k < ineq.inputs; ++k) {
                    Observable o;
                    o.base = operator_from_dense(settings[size_t(p)][size_t(k)],
                                                 regions[size_t(p)]);
                    o.norm = 1.0;
                    asg.settings[size_t(p)].push_back(std::move(o));
                }
            best.assignment = std::move(asg);
        }
    }
    best.restarts_used = std::max(1, opts.restarts);
    return best;
}

namespace {

// Bipartitions as the block containing party 0; ordered by descending block
// size, then ascending bitmask (AB|C, AC|B, A|BC for n = 3).
std::vector<int> bipartition_masks(int n) {
    std::vector<int> masks;
    for (int m = 1; m < (1 << n) - 1; ++m)
        if (m & 1) masks.push_back(m);
    std::stable_sort(masks.begin(), masks.end(), [](int a, int b) {
        return __builtin_popcount(unsigned(a)) > __builtin_popcount(unsigned(b));
    });
    return masks;
}

// Fast path for full-correlator inequalities: only the product of a block's
// outputs enters, and it is an arbitrary function of the block's inputs.
double bound_full_correlator(const BellInequality& ineq) {
    const int n = ineq.n;
    std::vector<double> psi(size_t(1) << n, 0.0);
    for (const auto& t : ineq.terms) {
        int idx = 0;
        for (int j = 0; j < n; ++j) idx = (idx << 1) | t.inputs[size_t(j)];
        psi[size_t(idx)] += t.coeff;
    }
    double best = 0;
    for (int mask : bipartition_masks(n)) {
        std::vector<int> in_block, out_block;
        for (int p = 0; p < n; ++p)
            ((mask >> p) & 1 ? in_block : out_block).push_back(p);
        const int bs = int(in_block.size());
        const int os = int(out_block.size());
        const long f_count = 1L << (1 << bs);
        for (long f = 0; f < f_count; ++f) {
            double total = 0;
            for (int ko = 0; ko < (1 << os); ++ko) {
                double inner = 0;
                for (int kb = 0; kb < (1 << bs); ++kb) {
                    int idx = 0;
                    for (int j = 0; j < n; ++j) {
                        int bit;
                        const auto itb = std::find(in_block.begin(), in_block.end(), j);
                        if (itb != in_block.end())
                            bit = (kb >> (itb - in_block.begin())) & 1;
                        else {
                            const auto ito = std::find(out_block.begin(), out_block.end(), j);
                            bit = (ko >> (ito - out_block.begin())) & 1;
                        }
                        idx = (idx << 1) | bit;
                    }
                    const int fk = (f >> kb) & 1 ? -1 : 1;
                    inner += psi[size_t(idx)] * fk;
                }
                total += std::abs(inner);  // optimal g picks the sign per tuple
            }
            best = std::max(best, total);
        }
    }
    return best;
}

// General path: per-party deterministic output functions over the joint
// inputs of the party's block.  Correlators touching part of a block average
// over the block's unspecified inputs.
double bound_general(const BellInequality& ineq) {
    const int n = ineq.n;
    double best = -std::numeric_limits<double>::infinity();
    for (int mask : bipartition_masks(n)) {
        std::vector<std::vector<int>> blocks(2);
        for (int p = 0; p < n; ++p) blocks[size_t(((mask >> p) & 1) ? 0 : 1)].push_back(p);

        // strategy of block b: per party, a function {0,1}^{|block|} -> {+-1},
        // encoded as a bitmask of length 2^{|block|}
        std::vector<long> strat_count(2), func_count(2);
        for (int b = 0; b < 2; ++b) {
            func_count[size_t(b)] = 1L << (1 << blocks[size_t(b)].size());
            strat_count[size_t(b)] = 1;
            for (size_t i = 0; i < blocks[size_t(b)].size(); ++i)
                strat_count[size_t(b)] *= func_count[size_t(b)];
        }

        auto party_block = [&](int p) { return ((mask >> p) & 1) ? 0 : 1; };
        auto party_pos = [&](int p) {
            const auto& blk = blocks[size_t(party_block(p))];
            return int(std::find(blk.begin(), blk.end(), p) - blk.begin());
        };

        for (long s0 = 0; s0 < strat_count[0]; ++s0) {
            std::vector<long> f0(blocks[0].size());
            long t = s0;
            for (size_t i = 0; i < blocks[0].size(); ++i) {
                f0[i] = t % func_count[0];
                t /= func_count[0];
            }
            for (long s1 = 0; s1 < strat_count[1]; ++s1) {
                std::vector<long> f1(blocks[1].size());
                long u = s1;
                for (size_t i = 0; i < blocks[1].size(); ++i) {
                    f1[i] = u % func_count[1];
                    u /= func_count[1];
                }
                double value = 0;
                for (const auto& term : ineq.terms) {
                    double factor = 1.0;
                    for (int b = 0; b < 2 && factor != 0.0; ++b) {
                        const auto& blk = blocks[size_t(b)];
                        const auto& fs = b == 0 ? f0 : f1;
                        // specified inputs of this block from the term
                        int spec_mask = 0, spec_bits = 0;
                        std::vector<int> members;
                        for (size_t j = 0; j < term.parties.size(); ++j) {
                            const int p = term.parties[j];
                            if (party_block(p) != b) continue;
                            members.push_back(p);
                            const int pos = party_pos(p);
                            spec_mask |= 1 << pos;
                            spec_bits |= term.inputs[j] << pos;
                        }
                        if (members.empty()) continue;
                        // average the members' output product over unspecified inputs
                        double acc = 0;
                        int count = 0;
                        for (int kb = 0; kb < (1 << blk.size()); ++kb) {
                            if ((kb & spec_mask) != spec_bits) continue;
                            int prod = 1;
                            for (int p : members)
                                prod *= ((fs[size_t(party_pos(p))] >> kb) & 1) ? -1 : 1;
                            acc += prod;
                            ++count;
                        }
                        factor *= acc / count;
                    }
                    value += term.coeff * factor;
                }
                best = std::max(best, value);
            }
        }
    }
    return best;
}

}  // namespace

int bipartition_count(int n) { return (1 << (n - 1)) - 1; }

double biseparable_bound(const BellInequality& ineq) {
    ineq.validate();
    if (ineq.n < 2) throw ConfigError("biseparable_bound: need at least 2 parties");
    if (ineq.inputs != 2)
        throw ResourceError("biseparable_bound: enumeration supports 2 inputs per party; "
                            "use the catalog bound");
    if (ineq.n > 4)
        throw ResourceError("biseparable_bound: enumeration supports n <= 4; "
                            "use the catalog bound");
    if (ineq.full_correlator()) return bound_full_correlator(ineq);
    return bound_general(ineq);
}

CoefficientSums coefficient_sums(const BellInequality& ineq,
                                 const std::vector<int>& region_sizes) {
    ineq.validate();
    if (int(region_sizes.size()) != ineq.n)
        throw ConfigError("coefficient_sums: region_sizes length must equal party count");
    CoefficientSums out;
    for (const auto& term : ineq.terms) {
        const int s = int(term.parties.size());
        const double a = std::abs(term.coeff);
        out.eta += a;
        out.gamma_hat += a;
        if (s >= 3) out.gamma += (s - 2) * a;
        double xi = 1.0;
        std::vector<double> sizes;
        for (int p : term.parties) {
            xi *= region_sizes[size_t(p)];
            sizes.push_back(double(region_sizes[size_t(p)]));
        }
        out.mu_hat += xi * a;
        // alpha = sum_{i=1}^{s-2} prod_{j=i}^{s} |X_j|
        double alpha = 0;
        for (int i = 0; i + 2 < s; ++i) {
            double prod = 1;
            for (int j = i; j < s; ++j) prod *= sizes[size_t(j)];
            alpha += prod;
        }
        out.mu += alpha * a;
    }
    return out;
}

QuantumState random_biseparable_state(int n, const std::vector<double>& weights,
                                      std::uint64_t seed) {
    if (n < 3) throw ConfigError("random_biseparable_state: need n >= 3");
    if (n > kDenseCapSites) throw ResourceError("random_biseparable_state: too many parties");
    const auto masks = bipartition_masks(n);
    if (weights.size() != masks.size())
        throw ConfigError("random_biseparable_state: expected " + std::to_string(masks.size()) +
                          " bipartition weights");
    double sum = 0;
    for (double w : weights) {
        if (w < 0) throw ConfigError("random_biseparable_state: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("random_biseparable_state: weights must sum to 1");

    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    const Eigen::Index dim = Eigen::Index(1) << n;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    uint64_t master = seed;
    for (size_t b = 0; b < masks.size(); ++b) {
        const uint64_t sub = splitmix64(master);
        if (weights[b] == 0) continue;
        std::mt19937_64 rng(sub);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<int> block, rest;
        for (int p = 0; p < n; ++p)
            ((masks[b] >> p) & 1 ? block : rest).push_back(p);
        auto random_pure_density = [&](int k) {
            const Eigen::Index d = Eigen::Index(1) << k;
            Eigen::VectorXcd v(d);
            for (Eigen::Index i = 0; i < d; ++i) v[i] = cplx(gauss(rng), gauss(rng));
            v.normalize();
            return Eigen::MatrixXcd(v * v.adjoint());
        };
        const Eigen::MatrixXcd left =
            embed_into(random_pure_density(int(block.size())), block, all);
        const Eigen::MatrixXcd right =
            embed_into(random_pure_density(int(rest.size())), rest, all);
        rho += weights[b] * (left * right);
    }
    QuantumState st;
    st.pure = false;
    st.n_sites = n;
    st.mat = std::move(rho);
    return st;
}

}  // namespace spinloc
