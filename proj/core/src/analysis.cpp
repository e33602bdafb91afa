#include "spinloc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace spinloc {

namespace {

constexpr Pauli kMenu[3] = {Pauli::X, Pauli::Y, Pauli::Z};

Observable pauli_string(Pauli p, const std::vector<int>& sites) {
    PauliTerm term;
    for (int s : sites) term.factors[s] = p;
    Observable o;
    o.base = operator_from_terms({term});
    o.norm = 1.0;  // Pauli strings are unitary hermitian
    return o;
}

struct PreparedStates {
    std::vector<std::pair<double, QuantumState>> states;  // (t, state), t ascending
    bool degenerate = false;
};

PreparedStates prepare_states(const SweepConfig& cfg, const std::vector<double>& t_list) {
    PreparedStates out;
    switch (cfg.state.family) {
        case StateFamily::Ground: {
            auto [st, sd] = ground_state(cfg.hamiltonian);
            out.degenerate = sd.degenerate;
            out.states.emplace_back(0.0, std::move(st));
            return out;
        }
        case StateFamily::Gibbs: {
            out.states.emplace_back(0.0, gibbs_state(cfg.hamiltonian, cfg.state.beta));
            return out;
        }
        case StateFamily::Evolved: {
            const int n = cfg.lattice.size();
            std::vector<Eigen::Matrix2cd> locals = cfg.state.initial_locals;
            if (locals.empty()) {
                Eigen::Matrix2cd zero = Eigen::Matrix2cd::Zero();
                zero(0, 0) = 1.0;
                locals.assign(size_t(n), zero);
            }
            if (int(locals.size()) != n)
                throw ConfigError("state: initial locals must cover every site");
            const QuantumState initial = product_state(locals);
            const SpectralDecomposition sd = eigendecompose(cfg.hamiltonian);
            std::vector<double> ts = t_list;
            if (ts.empty()) ts.push_back(cfg.state.t);
            std::sort(ts.begin(), ts.end());
            ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
            for (double t : ts) out.states.emplace_back(t, evolve(initial, sd, t));
            return out;
        }
    }
    throw ConfigError("state: unknown family");
}

// Sequential defect on the reduced state of the region union, maximized over
// uniform Pauli strings per region.
SweepRow row_defect(const QuantumState& state, const std::vector<Region>& regions) {
    std::vector<int> u;
    for (const auto& r : regions)
        u.insert(u.end(), r.site_indices.begin(), r.site_indices.end());
    std::sort(u.begin(), u.end());

    QuantumState small;
    small.pure = false;
    small.n_sites = int(u.size());
    small.mat = reduce(state, Region{u});

    auto local = [&u](int site) {
        return int(std::lower_bound(u.begin(), u.end(), site) - u.begin());
    };
    ObsList obs;
    for (const auto& r : regions) {
        std::vector<int> mapped;
        for (int s : r.site_indices) mapped.push_back(local(s));
        obs.emplace_back(pauli_string(Pauli::X, mapped), Region{mapped});
    }

    const int s = int(regions.size());
    SweepRow row;
    row.s = s;
    row.defect = -1;
    std::vector<int> combo(size_t(s), 0);
    const long total = long(std::pow(3.0, s) + 0.5);
    for (long c = 0; c < total; ++c) {
        long v = c;
        for (int i = 0; i < s; ++i) {
            const int letter = int(v % 3);
            v /= 3;
            if (combo[size_t(i)] != letter || c == 0) {
                combo[size_t(i)] = letter;
                std::vector<int> mapped;
                for (int site : obs[size_t(i)].second.site_indices) mapped.push_back(site);
                obs[size_t(i)].first = pauli_string(kMenu[letter], mapped);
            }
        }
        const DefectRecord rec = defect_sequential(small, obs);
        if (rec.defect > row.defect) {
            row.defect = rec.defect;
            row.joint = rec.joint;
            row.factored = rec.factored;
            row.partition = rec.partition;
        }
    }
    int mx = 0;
    for (const auto& r : regions) mx = std::max(mx, r.size());
    row.max_region_size = mx;
    return row;
}

double linfit_slope_intercept(const std::vector<double>& x, const std::vector<double>& y,
                              double& slope, double& intercept) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = double(n) * sxx - sx * sx;
    if (std::abs(det) < 1e-300) throw DataError("fit: degenerate abscissae");
    slope = (double(n) * sxy - sx * sy) / det;
    intercept = (sy - slope * sx) / double(n);
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / double(n);
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (slope * x[i] + intercept);
        ss_res += r * r;
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    return ss_tot < 1e-300 ? 1.0 : 1.0 - ss_res / ss_tot;
}

}  // namespace

int max_feasible_tau(const Lattice& lat, int parties, int region_size) {
    if (parties < 2 || region_size < 1) throw ConfigError("sweep: need >= 2 regions of >= 1 site");
    // last site used: (parties-1)(region_size-1+tau) + region_size-1 <= L-1
    return (lat.size() - region_size - (parties - 1) * (region_size - 1)) / (parties - 1);
}

std::vector<Region> place_regions(const Lattice& lat, int parties, int region_size, int tau) {
    if (tau < 1) throw ConfigError("sweep: separation must be >= 1");
    const int feasible = max_feasible_tau(lat, parties, region_size);
    if (tau > feasible)
        throw DataError("sweep: separation " + std::to_string(tau) +
                        " unrealizable on this lattice; max feasible tau is " +
                        std::to_string(feasible));
    std::vector<Region> regions;
    int start = 0;
    for (int p = 0; p < parties; ++p) {
        std::vector<int> sites;
        for (int i = 0; i < region_size; ++i) sites.push_back(start + i);
        regions.push_back(make_region(lat, sites));
        start += region_size - 1 + tau;  // next start = this region's end + tau
    }
    return regions;
}

namespace {

std::vector<SweepRow> sweep_rows(const SweepConfig& cfg, const PreparedStates& prep) {
    if (cfg.parties < 3) throw ConfigError("sweep: defects need at least 3 regions");
    if (cfg.tau_list.empty()) throw ConfigError("sweep: empty tau schedule");
    if (cfg.hamiltonian.lattice_sites > cfg.lattice.size())
        throw ConfigError("sweep: hamiltonian support exceeds the lattice");
    if (cfg.optimize_bell && !cfg.inequality)
        throw ConfigError("sweep: optimize_bell requires an inequality");

    std::vector<int> taus = cfg.tau_list;
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    // validate the whole schedule up front so a partial CSV is never emitted
    std::map<int, std::vector<Region>> placements;
    for (int tau : taus)
        placements[tau] = place_regions(cfg.lattice, cfg.parties, cfg.region_size, tau);

    std::vector<SweepRow> rows;
    for (int tau : taus) {
        const auto& regions = placements[tau];
        for (const auto& [t, state] : prep.states) {
            SweepRow row = row_defect(state, regions);
            row.tau = tau;
            row.t = t;
            if (cfg.optimize_bell) {
                if (int(regions.size()) != cfg.inequality->n)
                    throw ConfigError("sweep: inequality arity differs from party count");
                row.bell = optimize(state, *cfg.inequality, regions, cfg.opt).value;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace

std::vector<SweepRow> sweep_separation(const SweepConfig& cfg) {
    return sweep_rows(cfg, prepare_states(cfg, cfg.t_list));
}

DecayFit fit_decay(const std::vector<std::pair<double, double>>& points, Normalization norm,
                   int max_region) {
    if (max_region < 1) throw ConfigError("fit_decay: max_region must be >= 1");
    const double scale = norm == Normalization::PerMaxRegion ? double(max_region) : 1.0;
    std::vector<double> xs, ys;
    int excluded = 0;
    for (const auto& [tau, defect] : points) {
        if (defect <= kDefectFloor) {
            ++excluded;
            continue;
        }
        xs.push_back(tau);
        ys.push_back(std::log(defect / scale));
    }
    if (xs.size() < 3)
        throw DataError("fit_decay: fewer than 3 usable points (" +
                        std::to_string(excluded) + " at or below the defect floor)");
    DecayFit fit;
    double slope = 0, intercept = 0;
    fit.r_squared = linfit_slope_intercept(xs, ys, slope, intercept);
    fit.c_est = std::exp(intercept);
    fit.kappa_est = -slope;
    fit.points_used = int(xs.size());
    fit.points_excluded = excluded;
    fit.normalization = norm;
    return fit;
}

LightConeFit fit_light_cone(const std::vector<ConePoint>& points) {
    std::set<double> tau_set, t_set;
    for (const auto& p : points) {
        tau_set.insert(p.tau);
        t_set.insert(p.t);
    }
    if (tau_set.size() < 3 || t_set.size() < 3)
        throw DataError("fit_light_cone: need a grid with >= 3 tau and >= 3 t values");

    // usable points: t > 0 (the t = 0 row is identically zero) above the floor
    std::map<double, std::vector<std::pair<double, double>>> by_t;  // t -> (tau, defect)
    for (const auto& p : points)
        if (p.t > 0 && p.defect > kDefectFloor) by_t[p.t].emplace_back(p.tau, p.defect);
    if (by_t.size() < 2) throw DataError("fit_light_cone: fewer than 2 usable t slices");

    const double t_hi = by_t.rbegin()->first;
    const double t_lo = by_t.begin()->first;
    if (by_t[t_hi].size() < 3)
        throw DataError("fit_light_cone: fewer than 3 usable tau points at the largest t");

    std::vector<double> xs, ys;
    for (const auto& [tau, d] : by_t[t_hi]) {
        xs.push_back(tau);
        ys.push_back(std::log(d));
    }
    double slope = 0, intercept = 0;
    linfit_slope_intercept(xs, ys, slope, intercept);
    const double kappa = -slope;
    if (kappa <= 0) throw DataError("fit_light_cone: non-positive kappa in the tau direction");

    // z(t) = mean_tau defect e^{kappa tau} = c (e^{kappa v t} - 1); invert the
    // growth ratio between the extreme t slices (monotone in v).
    auto zbar = [&](double t) {
        double acc = 0;
        for (const auto& [tau, d] : by_t[t]) acc += d * std::exp(kappa * tau);
        return acc / double(by_t[t].size());
    };
    const double target = zbar(t_hi) / zbar(t_lo);
    auto ratio = [&](double v) {
        return std::expm1(kappa * v * t_hi) / std::expm1(kappa * v * t_lo);
    };
    double lo = 1e-12, hi = 1.0;
    int guard = 0;
    while (ratio(hi) < target && ++guard < 60) hi *= 2;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) < target ? lo : hi) = mid;
    }
    LightConeFit fit;
    fit.kappa_est = kappa;
    fit.v_est = 0.5 * (lo + hi);
    fit.c_est = zbar(t_lo) / std::expm1(kappa * fit.v_est * t_lo);

    double ss = 0;
    int count = 0;
    for (const auto& [t, pts] : by_t)
        for (const auto& [tau, d] : pts) {
            const double model =
                fit.c_est * std::exp(-kappa * tau) * std::expm1(kappa * fit.v_est * t);
            ss += (model - d) * (model - d);
            ++count;
        }
    fit.residual = std::sqrt(ss / count);
    return fit;
}

EpsilonBounds epsilon_bound(const DecayFit& fit, const std::optional<LightConeFit>& cone,
                            const CoefficientSums& sums, int max_region, double tau,
                            std::optional<double> t) {
    EpsilonBounds out;
    if (t.has_value()) {
        if (!cone.has_value())
            throw ConfigError("epsilon_bound: time-dependent variants need a light-cone fit");
        const double f = cone->c_est * std::exp(-cone->kappa_est * tau) *
                         std::expm1(cone->kappa_est * cone->v_est * *t);
        out.variants.push_back({"mu_time", sums.mu * f});
        out.variants.push_back({"mu_hat_time", sums.mu_hat * f});
    } else {
        const double d = fit.c_est * std::exp(-fit.kappa_est * tau);
        if (fit.normalization == Normalization::PerMaxRegion) {
            out.variants.push_back({"eta_ground", sums.eta * d * max_region});
            out.variants.push_back({"gamma_ground", sums.gamma * d * max_region});
            out.variants.push_back({"gamma_hat_ground", sums.gamma_hat * d * max_region});
        } else {
            out.variants.push_back({"eta_thermal", sums.eta * d});
            out.variants.push_back({"gamma_thermal", sums.gamma * d});
            out.variants.push_back({"gamma_hat_thermal", sums.gamma_hat * d});
        }
    }
    out.minimal = out.variants.front();
    for (const auto& v : out.variants)
        if (v.value < out.minimal.value) out.minimal = v;
    return out;
}

double tau_star(const DecayFit& fit, double delta, double prefactor) {
    if (delta <= 0) throw ConfigError("tau_star: delta must be positive");
    if (prefactor <= 0) throw ConfigError("tau_star: prefactor must be positive");
    if (fit.kappa_est <= 0)
        throw DataError("tau_star: fitted kappa <= 0, no finite critical separation");
    return std::max(0.0, std::log(prefactor * fit.c_est / delta) / fit.kappa_est);
}

CertificationReport certify(const SweepConfig& cfg, const BellInequality& ineq,
                            const std::vector<Region>& regions, const CertifyOptions& opts) {
    ineq.validate();
    if (int(regions.size()) != ineq.n)
        throw ConfigError("certify: region count does not match the inequality");

    CertificationReport rep;
    rep.inequality = ineq.name;
    rep.regions = regions;
    rep.tau = min_separation(cfg.lattice, regions);
    rep.beta = cfg.state.beta;
    rep.t = cfg.state.t;
    rep.seed = opts.opt.seed;

    if (ineq.delta_loc.has_value())
        rep.delta_loc = *ineq.delta_loc;
    else
        rep.delta_loc = biseparable_bound(ineq);

    // one state preparation shared by the decay sweep and the certification
    SweepConfig sweep_cfg = cfg;
    sweep_cfg.parties = ineq.n;
    sweep_cfg.optimize_bell = false;
    std::vector<double> prep_ts = cfg.t_list;
    if (cfg.state.family == StateFamily::Evolved) prep_ts.push_back(cfg.state.t);
    const PreparedStates prep = prepare_states(cfg, prep_ts);
    const std::vector<SweepRow> rows = sweep_rows(sweep_cfg, prep);

    int max_region = 0;
    for (const auto& r : regions) max_region = std::max(max_region, r.size());
    const std::vector<int> sizes = [&] {
        std::vector<int> s;
        for (const auto& r : regions) s.push_back(r.size());
        return s;
    }();
    const CoefficientSums sums = coefficient_sums(ineq, sizes);

    std::optional<double> t_cert;
    switch (cfg.state.family) {
        case StateFamily::Ground: {
            rep.state_family = "ground";
            std::vector<std::pair<double, double>> pts;
            for (const auto& r : rows) pts.emplace_back(double(r.tau), r.defect);
            rep.fit = fit_decay(pts, Normalization::PerMaxRegion, cfg.region_size);
            break;
        }
        case StateFamily::Gibbs: {
            rep.state_family = "gibbs";
            std::vector<std::pair<double, double>> pts;
            for (const auto& r : rows) pts.emplace_back(double(r.tau), r.defect);
            rep.fit = fit_decay(pts, Normalization::Raw);
            break;
        }
        case StateFamily::Evolved: {
            rep.state_family = "evolved";
            std::vector<ConePoint> pts;
            double t_max = 0;
            for (const auto& r : rows) {
                pts.push_back({double(r.tau), r.t, r.defect});
                t_max = std::max(t_max, r.t);
            }
            rep.cone = fit_light_cone(pts);
            std::vector<std::pair<double, double>> slice;
            for (const auto& r : rows)
                if (r.t == t_max) slice.emplace_back(double(r.tau), r.defect);
            rep.fit = fit_decay(slice, Normalization::Raw);
            t_cert = cfg.state.t;
            break;
        }
    }

    // hypothesis flags
    rep.gap_degenerate = prep.degenerate;
    rep.beta_unscanned = cfg.state.family == StateFamily::Gibbs && cfg.state.beta > 0 &&
                         rep.fit.kappa_est <= 0;

    // the certification state itself
    const QuantumState* state = &prep.states.back().second;
    if (cfg.state.family == StateFamily::Evolved) {
        for (const auto& [t, st] : prep.states)
            if (t == cfg.state.t) state = &st;
    }

    const BellResult res = optimize(*state, ineq, regions, opts.opt);
    rep.bell_value = res.value;
    rep.see_saw_iterations = res.iterations;
    rep.see_saw_converged = res.converged;

    const EpsilonBounds eps =
        epsilon_bound(rep.fit, rep.cone, sums, max_region, double(rep.tau), t_cert);
    rep.epsilon_variants = eps.variants;
    rep.epsilon_variant = eps.minimal.name;
    rep.epsilon = eps.minimal.value;
    rep.epsilon_local = rep.bell_value <= rep.delta_loc + rep.epsilon;

    if (rep.fit.kappa_est > 0)
        rep.tau_star_value = tau_star(rep.fit, opts.delta, sums.eta);
    return rep;
}

bool recompute_verdict(const CertificationReport& rep) {
    return rep.bell_value <= rep.delta_loc + rep.epsilon;
}

}  // namespace spinloc
