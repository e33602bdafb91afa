#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "spinloc/analysis.hpp"

namespace spinloc {

inline constexpr const char* kEngineVersion = "1.0.0";

// Everything a pipeline run needs, decoded from a JSON config.  Site labels
// are 1-based in configs and reports, 0-based internally.
struct ExperimentConfig {
    Lattice lattice;
    Operator hamiltonian;
    StateSpec state;
    std::vector<Region> regions;  // certification regions; may be empty
    std::vector<int> tau_list;
    std::vector<double> t_list;
    int parties = 3;
    int region_size = 1;
    std::optional<BellInequality> inequality;
    OptimizeOptions opt;
    double delta = 0.01;  // tau_star margin
    std::string output;
    bool spectrum_full = false;
};

// Throws ConfigError with a field-path diagnostic on any schema violation.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

SweepConfig to_sweep_config(const ExperimentConfig& cfg);

// Pinned CSV schema: header tau,t,s,partition,joint,factored,defect,
// max_region_size; LF endings; 10 significant digits.
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

nlohmann::json fit_json(const DecayFit& fit);
nlohmann::json cone_json(const LightConeFit& fit);
nlohmann::json report_json(const CertificationReport& rep);

nlohmann::json inequality_json(const BellInequality& ineq);
BellInequality inequality_from_json(const nlohmann::json& j);

// "svetlichny3" or "seevinck_svetlichny<N>" with an optional +/- suffix.
BellInequality catalog_inequality(const std::string& name);

// <path> gets the little-endian (re, im) double pairs (row-major for mixed
// states); <path>.json gets the sidecar.
void dump_state(const QuantumState& st, const Lattice& lat, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace spinloc
