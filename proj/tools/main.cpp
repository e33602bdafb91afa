#include <CLI11.hpp>
#include <iostream>
#include <set>

#include "spinloc/io.hpp"

namespace {

using namespace spinloc;
using nlohmann::json;

struct GlobalArgs {
    std::string config_path;
    std::string out_path;
    int threads = 1;
    std::optional<std::uint64_t> seed;
    bool dump = false;
};

void emit(const GlobalArgs& g, const std::string& content) {
    if (g.out_path.empty())
        std::cout << content;
    else
        write_text_file(g.out_path, content);
}

ExperimentConfig config_for(const GlobalArgs& g) {
    if (g.config_path.empty()) throw ConfigError("--config is required for this subcommand");
    ExperimentConfig cfg = load_config(g.config_path);
    if (g.seed) cfg.opt.seed = *g.seed;
    return cfg;
}

// All heavy paths are sequential by construction, so any worker count gives
// identical bytes; the flag is validated and otherwise inert.
void check_threads(int threads) {
    if (threads < 1) throw ConfigError("--threads must be >= 1");
}

QuantumState prepare_for_dump(const ExperimentConfig& cfg) {
    switch (cfg.state.family) {
        case StateFamily::Ground:
            return ground_state(cfg.hamiltonian).first;
        case StateFamily::Gibbs:
            return gibbs_state(cfg.hamiltonian, cfg.state.beta);
        case StateFamily::Evolved: {
            std::vector<Eigen::Matrix2cd> locals = cfg.state.initial_locals;
            if (locals.empty()) {
                Eigen::Matrix2cd zero = Eigen::Matrix2cd::Zero();
                zero(0, 0) = 1.0;
                locals.assign(size_t(cfg.lattice.size()), zero);
            }
            return evolve(product_state(locals), cfg.hamiltonian, cfg.state.t);
        }
    }
    throw ConfigError("state: unknown family");
}

void maybe_dump(const GlobalArgs& g, const ExperimentConfig& cfg) {
    if (!g.dump) return;
    const std::string base = g.out_path.empty() ? std::string("state.bin") : g.out_path + ".state";
    dump_state(prepare_for_dump(cfg), cfg.lattice, base);
}

int cmd_build(const GlobalArgs& g) {
    const ExperimentConfig cfg = config_for(g);
    const Operator& h = cfg.hamiltonian;
    json out = {{"sites", cfg.lattice.size()},
                {"terms", h.terms.size()},
                {"hermitian", h.hermitian},
                {"long_range_warning", h.long_range_warning}};
    if (cfg.spectrum_full) {
        const SpectralData sd = spectrum(h);  // resource error above the dense cap
        json head = json::array();
        for (size_t i = 0; i < sd.eigenvalues.size() && i < 8; ++i)
            head.push_back(sd.eigenvalues[i]);
        out["spectrum_head"] = head;
        out["gap"] = sd.gap;
        out["degenerate"] = sd.degenerate;
    }
    maybe_dump(g, cfg);
    emit(g, out.dump(2) + "\n");
    return 0;
}

int cmd_sweep(const GlobalArgs& g) {
    const ExperimentConfig cfg = config_for(g);
    if (cfg.tau_list.empty()) throw ConfigError("sweep: config lacks a sweep.tau_list schedule");
    const std::vector<SweepRow> rows = sweep_separation(to_sweep_config(cfg));
    maybe_dump(g, cfg);
    emit(g, sweep_csv(rows));
    return 0;
}

int cmd_certify(const GlobalArgs& g) {
    const ExperimentConfig cfg = config_for(g);
    if (!cfg.inequality) throw ConfigError("certify: config lacks an inequality");
    if (cfg.regions.empty()) throw ConfigError("certify: config lacks regions");
    if (cfg.tau_list.empty()) throw ConfigError("certify: config lacks a sweep.tau_list schedule");
    CertifyOptions opts;
    opts.opt = cfg.opt;
    opts.delta = cfg.delta;
    const CertificationReport rep =
        certify(to_sweep_config(cfg), *cfg.inequality, cfg.regions, opts);
    maybe_dump(g, cfg);
    emit(g, report_json(rep).dump(2) + "\n");
    return rep.epsilon_local ? 0 : 1;
}

int cmd_fit(const GlobalArgs& g, const std::string& csv_path, const std::string& norm_name,
            int max_region) {
    const std::vector<SweepRow> rows = parse_sweep_csv(read_text_file(csv_path));
    std::set<int> taus;
    std::set<double> ts;
    for (const auto& r : rows) {
        taus.insert(r.tau);
        ts.insert(r.t);
    }
    json out;
    if (ts.size() > 1) {  // both directions vary: light-cone dispatch
        std::vector<ConePoint> pts;
        for (const auto& r : rows) pts.push_back({double(r.tau), r.t, r.defect});
        out = cone_json(fit_light_cone(pts));
    } else {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : rows) pts.emplace_back(double(r.tau), r.defect);
        const Normalization norm = norm_name == "per_maxregion" ? Normalization::PerMaxRegion
                                                                : Normalization::Raw;
        int mx = max_region;
        if (mx < 1)
            for (const auto& r : rows) mx = std::max(mx, r.max_region_size);
        out = fit_json(fit_decay(pts, norm, std::max(1, mx)));
    }
    emit(g, out.dump(2) + "\n");
    return 0;
}

BellInequality inequality_from_arg(const GlobalArgs& g, const std::string& arg) {
    if (!arg.empty()) {
        if (arg.size() > 5 && arg.substr(arg.size() - 5) == ".json")
            return inequality_from_json(json::parse(read_text_file(arg)));
        return catalog_inequality(arg);
    }
    const ExperimentConfig cfg = config_for(g);
    if (!cfg.inequality) throw ConfigError("bound: config lacks an inequality");
    return *cfg.inequality;
}

int cmd_bound(const GlobalArgs& g, const std::string& arg) {
    const BellInequality ineq = inequality_from_arg(g, arg);
    const double bound = biseparable_bound(ineq);
    json out = {{"name", ineq.name}, {"biseparable_bound", bound}};
    if (ineq.delta_loc) out["catalog_delta_loc"] = *ineq.delta_loc;
    emit(g, out.dump(2) + "\n");
    return 0;
}

int cmd_bell(const GlobalArgs& g) {
    const ExperimentConfig cfg = config_for(g);
    if (!cfg.inequality) throw ConfigError("bell: config lacks an inequality");
    if (cfg.regions.empty()) throw ConfigError("bell: config lacks regions");
    const QuantumState state = prepare_for_dump(cfg);
    const BellResult res = optimize(state, *cfg.inequality, cfg.regions, cfg.opt);
    if (g.dump) {
        const std::string base =
            g.out_path.empty() ? std::string("state.bin") : g.out_path + ".state";
        dump_state(state, cfg.lattice, base);
    }
    json out = {{"name", cfg.inequality->name},
                {"value", res.value},
                {"iterations", res.iterations},
                {"restarts_used", res.restarts_used},
                {"converged", res.converged},
                {"identity_tie_break", res.identity_tie_break},
                {"seed", cfg.opt.seed}};
    emit(g, out.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-lattice epsilon-locality certification toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags are accepted after the subcommand too

    GlobalArgs g;
    app.add_option("--config", g.config_path, "JSON experiment config")->expected(1);
    app.add_option("--out", g.out_path, "output file (default: stdout)");
    app.add_option("--threads", g.threads, "worker count (results are thread-count independent)");
    std::uint64_t seed_raw = 0;
    auto* seed_opt = app.add_option("--seed", seed_raw, "override the config seed");
    app.add_flag("--dump-state", g.dump, "also write the prepared state as binary + sidecar");

    auto* build = app.add_subcommand("build", "build the Hamiltonian and print a summary");
    auto* sweep = app.add_subcommand("sweep", "run a separation sweep, emit the defect CSV");
    auto* certify = app.add_subcommand("certify", "full epsilon-locality certification report");
    auto* fit = app.add_subcommand("fit", "fit decay / light-cone constants from a sweep CSV");
    auto* bound = app.add_subcommand("bound", "exact biseparable bound by enumeration");
    auto* bell = app.add_subcommand("bell", "single see-saw Bell optimization");

    std::string csv_path, norm_name = "raw", bound_arg;
    int fit_max_region = 0;
    fit->add_option("csv", csv_path, "sweep CSV path")->required();
    fit->add_option("--normalization", norm_name, "per_maxregion | raw")
        ->check(CLI::IsMember({"per_maxregion", "raw"}));
    fit->add_option("--max-region", fit_max_region, "|X| for per_maxregion fits");
    bound->add_option("inequality", bound_arg, "catalog name or inequality JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        check_threads(g.threads);
        if (seed_opt->count()) g.seed = seed_raw;
        if (build->parsed()) return cmd_build(g);
        if (sweep->parsed()) return cmd_sweep(g);
        if (certify->parsed()) return cmd_certify(g);
        if (fit->parsed()) return cmd_fit(g, csv_path, norm_name, fit_max_region);
        if (bound->parsed()) return cmd_bound(g, bound_arg);
        if (bell->parsed()) return cmd_bell(g);
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::Config:
                return 2;
            case ErrorKind::Resource:
                return 3;
            case ErrorKind::Data:
                return 4;
        }
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
