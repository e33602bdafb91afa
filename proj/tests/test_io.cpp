#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "spinloc/io.hpp"

using namespace spinloc;
using nlohmann::json;

namespace {

json minimal_config() {
    return json{{"lattice", {{"kind", "chain"}, {"L", 6}}},
                {"hamiltonian", {{"family", "xy_chain"}, {"gamma", 0.5}, {"fields", 3.0}}},
                {"state", {{"family", "ground"}}}};
}

bool throws_with(const json& j, const std::string& needle) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
    const ExperimentConfig cfg = parse_config(minimal_config());
    CHECK(cfg.lattice.size() == 6);
    CHECK(cfg.hamiltonian.hermitian);
    CHECK(cfg.state.family == StateFamily::Ground);
    CHECK(cfg.parties == 3);
    CHECK(cfg.region_size == 1);
    CHECK(cfg.delta == doctest::Approx(0.01));
    CHECK_FALSE(cfg.inequality.has_value());
}

TEST_CASE("config errors carry field paths") {
    json j = minimal_config();
    j.erase("state");
    CHECK(throws_with(j, "config.state"));

    j = minimal_config();
    j["lattice"]["kind"] = "ring";
    CHECK(throws_with(j, "config.lattice.kind"));

    j = minimal_config();
    j["hamiltonian"]["fields"] = json::array({1.0, 2.0});  // wrong length
    CHECK(throws_with(j, "config.hamiltonian.fields"));

    j = minimal_config();
    j["state"] = {{"family", "gibbs"}};  // missing beta
    CHECK(throws_with(j, "config.state.beta"));

    j = minimal_config();
    j["state"] = {{"family", "gibbs"}, {"beta", -1.0}};
    CHECK(throws_with(j, "config.state.beta"));

    j = minimal_config();
    j["regions"] = json::array({json::array({0})});  // labels are 1-based
    CHECK(throws_with(j, "config.regions[0]"));

    j = minimal_config();
    j["sweep"] = {{"tau_list", json::array()}};
    CHECK(throws_with(j, "config.sweep.tau_list"));

    j = minimal_config();
    j["delta"] = 0.0;
    CHECK(throws_with(j, "config.delta"));
}

TEST_CASE("regions convert 1-based labels and round-trip through reports") {
    json j = minimal_config();
    j["regions"] = json::array({json::array({1}), json::array({3}), json::array({5, 6})});
    const ExperimentConfig cfg = parse_config(j);
    REQUIRE(cfg.regions.size() == 3);
    CHECK(cfg.regions[0].site_indices == std::vector<int>{0});
    CHECK(cfg.regions[2].site_indices == std::vector<int>{4, 5});

    CertificationReport rep;
    rep.regions = cfg.regions;
    rep.fit.kappa_est = 1.0;
    const json out = report_json(rep);
    CHECK(out["regions"][2] == json::array({5, 6}));
    CHECK(out["engine_version"] == kEngineVersion);
    CHECK_FALSE(out.contains("tau_star"));  // NaN default stays out of the report
}

TEST_CASE("evolved state kets accept real and complex entries") {
    json j = minimal_config();
    j["lattice"]["L"] = 2;
    j["state"] = {{"family", "evolved"},
                  {"t", 0.5},
                  {"initial", json::array({json::array({1.0, 0.0}),
                                           json::array({json::array({0.0, 1.0}), 0.0})})}};
    const ExperimentConfig cfg = parse_config(j);
    REQUIRE(cfg.state.initial_locals.size() == 2);
    // i|0> normalizes to the same projector as |0>
    CHECK(std::abs(cfg.state.initial_locals[1](0, 0).real() - 1.0) < 1e-12);
    j["state"]["initial"][0] = json::array({0.0, 0.0});  // zero ket
    CHECK(throws_with(j, "state.initial[0]"));
}

TEST_CASE("sweep csv round-trips rows including bipartition commas") {
    std::vector<SweepRow> rows(2);
    rows[0].tau = 1;
    rows[0].t = 0.5;
    rows[0].s = 3;
    rows[0].partition = "sequential";
    rows[0].joint = 0.123456789012;
    rows[0].factored = -0.5;
    rows[0].defect = 0.623456789;
    rows[0].max_region_size = 1;
    rows[1].tau = 2;
    rows[1].t = 0;
    rows[1].s = 4;
    rows[1].partition = "bipartition:0,2";
    rows[1].joint = -1e-11;
    rows[1].factored = 0;
    rows[1].defect = 1e-11;
    rows[1].max_region_size = 2;

    const std::string csv = sweep_csv(rows);
    CHECK(csv.find("\r") == std::string::npos);
    CHECK(csv.rfind("tau,t,s,partition,joint,factored,defect,max_region_size\n", 0) == 0);

    const std::vector<SweepRow> back = parse_sweep_csv(csv);
    REQUIRE(back.size() == 2);
    CHECK(back[1].partition == "bipartition:0,2");
    CHECK(back[1].s == 4);
    CHECK(back[0].joint == doctest::Approx(rows[0].joint).epsilon(1e-9));
    CHECK(back[1].defect == doctest::Approx(1e-11).epsilon(1e-9));

    CHECK_THROWS_AS(parse_sweep_csv("wrong,header\n"), DataError);
    CHECK_THROWS_AS(parse_sweep_csv(csv + "1,2\n"), DataError);
    CHECK_THROWS_AS(parse_sweep_csv(csv + "x,0,3,sequential,0,0,0,1\n"), DataError);
}

TEST_CASE("catalog lookup understands the inequality names") {
    CHECK(catalog_inequality("svetlichny3").n == 3);
    CHECK(catalog_inequality("seevinck_svetlichny4").n == 4);
    CHECK(catalog_inequality("seevinck_svetlichny4+").name == "seevinck_svetlichny4+");
    CHECK(catalog_inequality("seevinck_svetlichny3-").name == "seevinck_svetlichny3-");
    CHECK_THROWS_AS(catalog_inequality("chsh"), ConfigError);
    CHECK_THROWS_AS(catalog_inequality("seevinck_svetlichny"), ConfigError);
}

TEST_CASE("inequality json round-trip preserves every term") {
    const BellInequality sv = svetlichny3();
    const BellInequality back = inequality_from_json(inequality_json(sv));
    CHECK(back.name == sv.name);
    CHECK(back.n == sv.n);
    REQUIRE(back.terms.size() == sv.terms.size());
    for (size_t i = 0; i < sv.terms.size(); ++i) {
        CHECK(back.terms[i].parties == sv.terms[i].parties);
        CHECK(back.terms[i].inputs == sv.terms[i].inputs);
        CHECK(back.terms[i].coeff == sv.terms[i].coeff);
    }
    REQUIRE(back.delta_loc.has_value());
    CHECK(*back.delta_loc == doctest::Approx(4.0));

    // a catalog name as a bare string also resolves
    CHECK(inequality_from_json(json("svetlichny3")).terms.size() == 8);
    // malformed custom inequality gets a config error
    CHECK_THROWS_AS(inequality_from_json(json{{"name", "x"}, {"n", 2}}), ConfigError);
}

TEST_CASE("fit and cone json carry the fitted constants") {
    DecayFit fit;
    fit.c_est = 2;
    fit.kappa_est = 0.5;
    fit.r_squared = 0.99;
    fit.points_used = 5;
    fit.normalization = Normalization::PerMaxRegion;
    const json fj = fit_json(fit);
    CHECK(fj["type"] == "decay");
    CHECK(fj["normalization"] == "per_maxregion");
    CHECK(fj["kappa_est"] == doctest::Approx(0.5));

    LightConeFit cone;
    cone.v_est = 2;
    cone.kappa_est = 1;
    cone.c_est = 0.7;
    cone.residual = 1e-9;
    const json cj = cone_json(cone);
    CHECK(cj["type"] == "light_cone");
    CHECK(cj["v_est"] == doctest::Approx(2.0));
}

TEST_CASE("malformed json files raise config errors") {
    const std::string path = "malformed_config_test.json";
    write_text_file(path, "{ not json");
    CHECK_THROWS_AS(load_config(path), ConfigError);
    CHECK_THROWS_AS(load_config("no_such_file_here.json"), DataError);
    std::remove(path.c_str());
}

TEST_CASE("dump_state writes the binary payload and sidecar") {
    QuantumState st;
    st.pure = true;
    st.n_sites = 2;
    st.vec = Eigen::VectorXcd::Zero(4);
    st.vec[0] = cplx(0.6, 0.0);
    st.vec[3] = cplx(0.0, 0.8);
    const Lattice lat = build_chain(2);
    const std::string path = "dump_state_test.bin";
    dump_state(st, lat, path);
    const std::string raw = read_text_file(path);
    CHECK(raw.size() == 4 * 2 * sizeof(double));
    double first = 0;
    std::memcpy(&first, raw.data(), sizeof first);
    CHECK(first == doctest::Approx(0.6));
    const json side = json::parse(read_text_file(path + ".json"));
    CHECK(side["dimension"] == 4);
    CHECK(side["kind"] == "pure");
    CHECK(side["layout"] == "vector");
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}
