#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qwsim/experiments.hpp"

namespace qwsim {

enum class Experiment { hom, cnot, fringe, fom };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);

/// Fully resolved run description: what to simulate, with which source,
/// detectors and scan grid, under which seed.
struct RunConfig {
    Experiment experiment = Experiment::hom;
    RunMode mode = RunMode::mc;
    std::uint64_t seed = 0;
    bool seed_was_explicit = false;
    std::string output_dir = ".";
    int threads = 1;

    SourceModel source;
    DetectorModel detector1 = preset("sspd");
    DetectorModel detector2 = preset("sspd");
    double window_ps = 1000.0;
    TimePs accidental_offset_ps = 100000;

    // hom
    std::vector<double> delays_ps;
    double acquisition_s = 60.0;
    std::string circuit_text;  // optional custom 2-mode chip, parse_circuit format

    // fringe
    std::vector<double> phases_rad;
    std::vector<double> voltages_v;
    double alpha_rad_per_v2 = 1.0;
    FringeMode fringe_mode = FringeMode::two_photon;

    // cnot
    double cnot_overlap = 1.0;
    std::uint64_t cnot_shots = 0;

    // fom
    std::vector<std::string> fom_detectors = {"sspd", "si_spad"};

    void validate() const;
    HomScanConfig hom_config() const;
    FringeScanConfig fringe_config() const;
    CnotConfig cnot_config() const;
};

/// Parsed key/value config text (sections in brackets, `#` comments).
/// Unknown sections or keys are rejected with their full key path.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

/// `section.key=value` override, applied after file parsing; flags win.
void apply_override(RunConfig& cfg, const std::string& dotted_key, const std::string& value);

/// The calibrated configuration reproducing the reference experiments.
/// `detector` selects the preset pair for the hom experiment.
RunConfig paper_defaults(Experiment experiment, const std::string& detector = "sspd");

/// Pair overlap whose fitted fringe contrast equals the target.
double fringe_overlap_for_contrast(double contrast);

/// Pair overlap whose analytic CNOT logical fidelity equals the target
/// (solved by bisection on the analytic truth table).
double cnot_overlap_for_fidelity(double fidelity);

/// Hex FNV-1a hash of the canonical config serialization.
std::string config_hash(const RunConfig& cfg);
std::string config_to_json(const RunConfig& cfg);

/// Execute the configured experiment and write results.csv, manifest.json
/// and (for fitted experiments) fit.json into cfg.output_dir.
/// Returns the paths written.
std::vector<std::string> run_experiment(const RunConfig& cfg);

/// Rebuild the exact RunConfig recorded in a manifest.
RunConfig config_from_manifest(const std::string& manifest_path);

}  // namespace qwsim
