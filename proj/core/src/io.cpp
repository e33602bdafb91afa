#include "spinloc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace spinloc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config." + path + ": " + what);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(path.empty() ? key : path + "." + key, "missing required field");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

Lattice parse_lattice(const json& j) {
    const std::string kind = as_string(require(j, "kind", "lattice"), "lattice.kind");
    const json& L = require(j, "L", "lattice");
    if (kind == "chain") {
        return build_chain(as_int(L, "lattice.L"));
    }
    if (kind == "grid") {
        if (!L.is_array() || L.size() != 2) fail("lattice.L", "grid needs [rows, cols]");
        return build_grid(as_int(L[0], "lattice.L[0]"), as_int(L[1], "lattice.L[1]"));
    }
    fail("lattice.kind", "unknown kind '" + kind + "' (chain|grid)");
}

std::vector<double> parse_fields(const json& j, int n, const std::string& path) {
    if (j.is_number()) return std::vector<double>(size_t(n), j.get<double>());
    if (!j.is_array()) fail(path, "expected a number or an array");
    if (int(j.size()) != n)
        fail(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
    std::vector<double> out;
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Operator parse_hamiltonian(const json& j, const Lattice& lat) {
    const std::string family = as_string(require(j, "family", "hamiltonian"),
                                         "hamiltonian.family");
    const std::vector<double> fields =
        j.contains("fields") ? parse_fields(j["fields"], lat.size(), "hamiltonian.fields")
                             : std::vector<double>(size_t(lat.size()), 1.0);
    if (family == "xy_chain") {
        const double gamma =
            j.contains("gamma") ? as_number(j["gamma"], "hamiltonian.gamma") : 0.0;
        return xy_chain_hamiltonian(lat, gamma, fields);
    }
    if (family == "grid") {
        const int k = j.contains("k") ? as_int(j["k"], "hamiltonian.k") : 1;
        Coupling c;
        if (j.contains("coupling")) {
            const json& cj = j["coupling"];
            if (!cj.is_object()) fail("hamiltonian.coupling", "expected an object");
            if (cj.contains("jx")) c.jx = as_number(cj["jx"], "hamiltonian.coupling.jx");
            if (cj.contains("jy")) c.jy = as_number(cj["jy"], "hamiltonian.coupling.jy");
            if (cj.contains("jz")) c.jz = as_number(cj["jz"], "hamiltonian.coupling.jz");
        }
        return grid_hamiltonian(lat, k, c, fields);
    }
    fail("hamiltonian.family", "unknown family '" + family + "' (xy_chain|grid)");
}

StateSpec parse_state(const json& j) {
    StateSpec spec;
    const std::string family = as_string(require(j, "family", "state"), "state.family");
    if (family == "ground") {
        spec.family = StateFamily::Ground;
    } else if (family == "gibbs") {
        spec.family = StateFamily::Gibbs;
        spec.beta = as_number(require(j, "beta", "state"), "state.beta");
        if (spec.beta < 0) fail("state.beta", "must be >= 0");
    } else if (family == "evolved") {
        spec.family = StateFamily::Evolved;
        spec.t = as_number(require(j, "t", "state"), "state.t");
        if (j.contains("initial")) {
            const json& init = j["initial"];
            if (!init.is_array()) fail("state.initial", "expected an array of local kets");
            for (size_t i = 0; i < init.size(); ++i) {
                const std::string p = "state.initial[" + std::to_string(i) + "]";
                const json& k = init[i];
                if (!k.is_array() || k.size() != 2) fail(p, "expected a 2-entry ket [a, b]");
                Eigen::Vector2cd v;
                for (int c = 0; c < 2; ++c) {
                    const json& e = k[size_t(c)];
                    if (e.is_number())
                        v[c] = e.get<double>();
                    else if (e.is_array() && e.size() == 2)
                        v[c] = cplx(as_number(e[0], p), as_number(e[1], p));
                    else
                        fail(p, "ket entries are numbers or [re, im] pairs");
                }
                const double nn = v.norm();
                if (nn < 1e-12) fail(p, "zero local ket");
                v /= nn;
                spec.initial_locals.push_back(v * v.adjoint());
            }
        }
    } else {
        fail("state.family", "unknown family '" + family + "' (ground|gibbs|evolved)");
    }
    return spec;
}

}  // namespace

BellInequality catalog_inequality(const std::string& name) {
    if (name == "svetlichny3") return svetlichny3();
    const std::string prefix = "seevinck_svetlichny";
    if (name.rfind(prefix, 0) == 0) {
        std::string rest = name.substr(prefix.size());
        int sign = +1;
        if (!rest.empty() && (rest.back() == '+' || rest.back() == '-')) {
            sign = rest.back() == '+' ? +1 : -1;
            rest.pop_back();
        }
        try {
            return seevinck_svetlichny(std::stoi(rest), sign);
        } catch (const std::invalid_argument&) {
        } catch (const std::out_of_range&) {
        }
    }
    throw ConfigError("inequality: unknown catalog name '" + name + "'");
}

BellInequality inequality_from_json(const nlohmann::json& j) {
    if (j.is_string()) return catalog_inequality(j.get<std::string>());
    BellInequality ineq;
    ineq.name = as_string(require(j, "name", "inequality"), "inequality.name");
    ineq.n = as_int(require(j, "n", "inequality"), "inequality.n");
    ineq.inputs = j.contains("inputs") ? as_int(j["inputs"], "inequality.inputs") : 2;
    const json& terms = require(j, "terms", "inequality");
    if (!terms.is_array() || terms.empty()) fail("inequality.terms", "expected a non-empty array");
    for (size_t i = 0; i < terms.size(); ++i) {
        const std::string p = "inequality.terms[" + std::to_string(i) + "]";
        BellTerm term;
        const json& parties = require(terms[i], "parties", p);
        const json& inputs = require(terms[i], "inputs", p);
        if (!parties.is_array() || !inputs.is_array()) fail(p, "parties/inputs must be arrays");
        for (const auto& v : parties) term.parties.push_back(as_int(v, p + ".parties"));
        for (const auto& v : inputs) term.inputs.push_back(as_int(v, p + ".inputs"));
        term.coeff = as_number(require(terms[i], "coeff", p), p + ".coeff");
        ineq.terms.push_back(std::move(term));
    }
    if (j.contains("delta_loc"))
        ineq.delta_loc = as_number(j["delta_loc"], "inequality.delta_loc");
    try {
        ineq.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("inequality: ") + e.what());
    }
    return ineq;
}

nlohmann::json inequality_json(const BellInequality& ineq) {
    json terms = json::array();
    for (const auto& t : ineq.terms)
        terms.push_back({{"parties", t.parties}, {"inputs", t.inputs}, {"coeff", t.coeff}});
    json out = {{"name", ineq.name}, {"n", ineq.n}, {"inputs", ineq.inputs}, {"terms", terms}};
    if (ineq.delta_loc) out["delta_loc"] = *ineq.delta_loc;
    return out;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    ExperimentConfig cfg;
    cfg.lattice = parse_lattice(require(j, "lattice", ""));
    cfg.hamiltonian = parse_hamiltonian(require(j, "hamiltonian", ""), cfg.lattice);
    cfg.state = parse_state(require(j, "state", ""));

    if (j.contains("regions")) {
        const json& rj = j["regions"];
        if (!rj.is_array()) fail("regions", "expected an array of site-label arrays");
        for (size_t i = 0; i < rj.size(); ++i) {
            const std::string p = "regions[" + std::to_string(i) + "]";
            if (!rj[i].is_array() || rj[i].empty()) fail(p, "expected a non-empty array");
            std::vector<int> sites;
            for (const auto& s : rj[i]) {
                const int label = as_int(s, p);
                if (label < 1 || label > cfg.lattice.size())
                    fail(p, "site label " + std::to_string(label) + " outside 1.." +
                                std::to_string(cfg.lattice.size()));
                sites.push_back(label - 1);
            }
            try {
                cfg.regions.push_back(make_region(cfg.lattice, sites));
            } catch (const Error& e) {
                fail(p, e.what());
            }
        }
    }

    if (j.contains("sweep")) {
        const json& sj = j["sweep"];
        const json& taus = require(sj, "tau_list", "sweep");
        if (!taus.is_array() || taus.empty()) fail("sweep.tau_list", "expected a non-empty array");
        for (const auto& t : taus) cfg.tau_list.push_back(as_int(t, "sweep.tau_list"));
        if (sj.contains("t_list")) {
            if (!sj["t_list"].is_array()) fail("sweep.t_list", "expected an array");
            for (const auto& t : sj["t_list"])
                cfg.t_list.push_back(as_number(t, "sweep.t_list"));
        }
        if (sj.contains("parties")) cfg.parties = as_int(sj["parties"], "sweep.parties");
        if (sj.contains("region_size"))
            cfg.region_size = as_int(sj["region_size"], "sweep.region_size");
        if (cfg.parties < 3) fail("sweep.parties", "must be >= 3");
        if (cfg.region_size < 1) fail("sweep.region_size", "must be >= 1");
    }

    if (j.contains("inequality")) cfg.inequality = inequality_from_json(j["inequality"]);

    if (j.contains("optimizer")) {
        const json& oj = j["optimizer"];
        if (!oj.is_object()) fail("optimizer", "expected an object");
        if (oj.contains("restarts")) cfg.opt.restarts = as_int(oj["restarts"], "optimizer.restarts");
        if (oj.contains("seed")) {
            if (!oj["seed"].is_number_unsigned() && !oj["seed"].is_number_integer())
                fail("optimizer.seed", "expected an unsigned integer");
            cfg.opt.seed = oj["seed"].get<std::uint64_t>();
        }
        if (oj.contains("tol")) cfg.opt.tol = as_number(oj["tol"], "optimizer.tol");
        if (oj.contains("max_iter")) cfg.opt.max_iter = as_int(oj["max_iter"], "optimizer.max_iter");
        if (cfg.opt.restarts < 1) fail("optimizer.restarts", "must be >= 1");
    }

    if (j.contains("delta")) {
        cfg.delta = as_number(j["delta"], "delta");
        if (cfg.delta <= 0) fail("delta", "must be > 0");
    }
    if (j.contains("output")) cfg.output = as_string(j["output"], "output");
    if (j.contains("spectrum")) {
        const std::string s = as_string(j["spectrum"], "spectrum");
        if (s != "full" && s != "none") fail("spectrum", "expected 'full' or 'none'");
        cfg.spectrum_full = s == "full";
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

SweepConfig to_sweep_config(const ExperimentConfig& cfg) {
    SweepConfig sc;
    sc.lattice = cfg.lattice;
    sc.hamiltonian = cfg.hamiltonian;
    sc.state = cfg.state;
    sc.parties = cfg.parties;
    sc.region_size = cfg.region_size;
    sc.tau_list = cfg.tau_list;
    sc.t_list = cfg.t_list;
    sc.inequality = cfg.inequality;
    sc.opt = cfg.opt;
    return sc;
}

namespace {

std::string num10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "tau,t,s,partition,joint,factored,defect,max_region_size\n";
    for (const auto& r : rows) {
        out += std::to_string(r.tau) + ',' + num10(r.t) + ',' + std::to_string(r.s) + ',' +
               r.partition + ',' + num10(r.joint) + ',' + num10(r.factored) + ',' +
               num10(r.defect) + ',' + std::to_string(r.max_region_size) + '\n';
    }
    return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        line != "tau,t,s,partition,joint,factored,defect,max_region_size")
        throw DataError("csv: missing or wrong header");
    std::vector<SweepRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        // the partition column may itself contain commas ("bipartition:0,1")
        if (cells.size() < 8) throw DataError("csv: line " + std::to_string(lineno) + " malformed");
        SweepRow r;
        try {
            r.tau = std::stoi(cells[0]);
            r.t = std::stod(cells[1]);
            r.s = std::stoi(cells[2]);
            const size_t extra = cells.size() - 8;
            r.partition = cells[3];
            for (size_t k = 0; k < extra; ++k) r.partition += ',' + cells[4 + k];
            r.joint = std::stod(cells[4 + extra]);
            r.factored = std::stod(cells[5 + extra]);
            r.defect = std::stod(cells[6 + extra]);
            r.max_region_size = std::stoi(cells[7 + extra]);
        } catch (const std::exception&) {
            throw DataError("csv: line " + std::to_string(lineno) + " malformed");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

nlohmann::json fit_json(const DecayFit& fit) {
    return {{"type", "decay"},
            {"c_est", fit.c_est},
            {"kappa_est", fit.kappa_est},
            {"r_squared", fit.r_squared},
            {"points_used", fit.points_used},
            {"points_excluded", fit.points_excluded},
            {"normalization",
             fit.normalization == Normalization::PerMaxRegion ? "per_maxregion" : "raw"}};
}

nlohmann::json cone_json(const LightConeFit& fit) {
    return {{"type", "light_cone"},
            {"v_est", fit.v_est},
            {"kappa_est", fit.kappa_est},
            {"c_est", fit.c_est},
            {"residual", fit.residual}};
}

nlohmann::json report_json(const CertificationReport& rep) {
    json regions = json::array();
    for (const auto& r : rep.regions) {
        json sites = json::array();
        for (int s : r.site_indices) sites.push_back(s + 1);  // 1-based in reports
        regions.push_back(sites);
    }
    json variants = json::array();
    for (const auto& v : rep.epsilon_variants)
        variants.push_back({{"name", v.name}, {"value", v.value}});
    json out = {{"engine_version", kEngineVersion},
                {"inequality", rep.inequality},
                {"regions", regions},
                {"tau", rep.tau},
                {"state_family", rep.state_family},
                {"beta", rep.beta},
                {"t", rep.t},
                {"delta_loc", rep.delta_loc},
                {"bell_value", rep.bell_value},
                {"fit", fit_json(rep.fit)},
                {"epsilon_variants", variants},
                {"epsilon_variant", rep.epsilon_variant},
                {"epsilon", rep.epsilon},
                {"epsilon_local", rep.epsilon_local},
                {"gap_degenerate", rep.gap_degenerate},
                {"beta_unscanned", rep.beta_unscanned},
                {"seed", rep.seed},
                {"see_saw_iterations", rep.see_saw_iterations},
                {"see_saw_converged", rep.see_saw_converged}};
    if (rep.cone) out["light_cone_fit"] = cone_json(*rep.cone);
    if (std::isfinite(rep.tau_star_value)) out["tau_star"] = rep.tau_star_value;
    return out;
}

void dump_state(const QuantumState& st, const Lattice& lat, const std::string& path) {
    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw DataError("dump_state: cannot open " + path);
    auto put = [&bin](cplx v) {
        const double re = v.real(), im = v.imag();
        bin.write(reinterpret_cast<const char*>(&re), sizeof re);
        bin.write(reinterpret_cast<const char*>(&im), sizeof im);
    };
    if (st.pure) {
        for (Eigen::Index i = 0; i < st.vec.size(); ++i) put(st.vec[i]);
    } else {
        for (Eigen::Index r = 0; r < st.mat.rows(); ++r)
            for (Eigen::Index c = 0; c < st.mat.cols(); ++c) put(st.mat(r, c));
    }
    bin.close();
    json side = {{"dimension", st.dim()},
                 {"n_sites", st.n_sites},
                 {"kind", st.pure ? "pure" : "mixed"},
                 {"layout", st.pure ? "vector" : "row_major"},
                 {"endianness", "little"},
                 {"lattice",
                  {{"kind", lat.dimension == 1 ? "chain" : "grid"}, {"sites", lat.size()}}}};
    write_text_file(path + ".json", side.dump(2) + "\n");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << content;
    if (!out) throw DataError("write failed for " + path);
}

}  // namespace spinloc
