// Command-line front end: experiment dispatch, deterministic seeding,
// CSV/JSON artifact emission, detector preset management.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qwsim/config.hpp"

namespace {

using qwsim::RunConfig;

struct CommonFlags {
    std::string config_path;
    bool paper_defaults = false;
    std::string detector;
    std::string mode;
    std::string output_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    double acquisition_s = 0.0;
    std::vector<std::string> overrides;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    auto* config_opt = cmd->add_option("-c,--config", flags.config_path, "Config file (key = value sections)");
    cmd->add_flag("--paper-defaults", flags.paper_defaults,
                  "Use the calibrated default configuration")
        ->excludes(config_opt);
    cmd->add_option("--detector", flags.detector, "Detector preset for both channels");
    cmd->add_option("--mode", flags.mode, "analytic or mc");
    cmd->add_option("-o,--output-dir", flags.output_dir, "Output directory (default $QWSIM_OUTPUT_DIR or .)");
    cmd->add_option("--seed", flags.seed, "Master seed (default: drawn from entropy)")
        ->check([&flags](const std::string&) {
            flags.seed_set = true;
            return std::string();
        });
    cmd->add_option("--threads", flags.threads, "Worker threads for scan points");
    cmd->add_option("--acquisition", flags.acquisition_s, "Seconds per scan point");
    cmd->add_option("--set", flags.overrides, "Override any config key, e.g. --set scan.window_ps=500")
        ->take_all();
}

RunConfig build_config(qwsim::Experiment experiment, const CommonFlags& flags) {
    RunConfig cfg;
    if (!flags.config_path.empty()) {
        cfg = qwsim::parse_config_file(flags.config_path);
        if (cfg.experiment != experiment)
            throw qwsim::ConfigError("config file is for experiment `" + to_string(cfg.experiment) +
                                     "`, not `" + to_string(experiment) + "`");
    } else {
        cfg = qwsim::paper_defaults(experiment, flags.detector.empty() ? "sspd" : flags.detector);
        if (!flags.seed_set) {
            std::random_device rd;
            cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        }
    }
    if (!flags.detector.empty()) {
        cfg.detector1 = qwsim::preset(flags.detector);
        cfg.detector2 = qwsim::preset(flags.detector);
    }
    if (!flags.mode.empty()) qwsim::apply_override(cfg, "mode", flags.mode);
    if (flags.seed_set) {
        cfg.seed = flags.seed;
        cfg.seed_was_explicit = true;
    }
    if (flags.threads > 0) cfg.threads = flags.threads;
    if (flags.acquisition_s > 0.0) cfg.acquisition_s = flags.acquisition_s;
    for (const auto& kv : flags.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw qwsim::ConfigError("--set expects key=value, got `" + kv + "`");
        qwsim::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!flags.output_dir.empty()) {
        cfg.output_dir = flags.output_dir;
    } else if (cfg.output_dir == ".") {
        if (const char* env = std::getenv("QWSIM_OUTPUT_DIR")) cfg.output_dir = env;
    }
    return cfg;
}

int execute(const RunConfig& cfg) {
    const auto written = qwsim::run_experiment(cfg);
    for (const auto& path : written) std::cout << "wrote " << path << "\n";
    return 0;
}

void print_fom_table(const std::vector<std::string>& names) {
    std::printf("%-10s %10s %12s %14s %10s %14s\n", "detector", "eta", "dark (Hz)",
                "jitter (ps)", "eta^2", "eta/(D*dt)");
    for (const auto& name : names) {
        const auto d = qwsim::preset(name);
        std::printf("%-10s %10.3g %12.3g %14.3g %10.3g %14.4g\n", d.label.c_str(), d.efficiency,
                    d.dark_rate_hz, d.jitter_fwhm_ps, qwsim::eta_squared(d),
                    qwsim::figure_of_merit(d));
    }
}

const char* error_kind(const std::exception& e) {
    if (dynamic_cast<const qwsim::ConfigError*>(&e)) return "config";
    if (dynamic_cast<const qwsim::CapacityError*>(&e)) return "capacity";
    if (dynamic_cast<const qwsim::FitError*>(&e)) return "fit";
    if (dynamic_cast<const std::domain_error*>(&e)) return "domain";
    if (dynamic_cast<const std::out_of_range*>(&e)) return "lookup";
    return "runtime";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum waveguide circuit experiments with realistic single-photon detectors"};
    app.require_subcommand(1);

    CommonFlags hom_flags, cnot_flags, fringe_flags, fom_flags;
    auto* hom = app.add_subcommand("hom", "Two-photon interference delay scan");
    add_common_flags(hom, hom_flags);
    auto* cnot = app.add_subcommand("cnot", "Post-selected CNOT truth table and fidelity");
    add_common_flags(cnot, cnot_flags);
    double cnot_overlap = -1.0;
    cnot->add_option("--overlap", cnot_overlap, "Photon pair overlap (default: calibrated)");
    auto* fringe = app.add_subcommand("fringe", "Mach-Zehnder fringe scan");
    add_common_flags(fringe, fringe_flags);
    std::string fringe_mode;
    fringe->add_option("--fringe-mode", fringe_mode, "single_photon or two_photon");
    auto* fom = app.add_subcommand("fom", "Detector figures of merit");
    add_common_flags(fom, fom_flags);

    auto* presets = app.add_subcommand("presets", "Detector preset management");
    presets->require_subcommand(1);
    auto* presets_list = presets->add_subcommand("list", "List known presets");
    std::string presets_file;
    presets_list->add_option("--file", presets_file, "Additional preset CSV to list");
    auto* presets_show = presets->add_subcommand("show", "Show one preset");
    std::string preset_name;
    presets_show->add_option("name", preset_name, "Preset label")->required();
    presets_show->add_option("--file", presets_file, "Preset CSV to search first");
    auto* presets_curve = presets->add_subcommand("from-curve", "Interpolate a detector from an efficiency curve");
    std::string curve_file;
    double curve_wavelength = 0.0, curve_dark = 0.0, curve_jitter = 60.0;
    presets_curve->add_option("file", curve_file, "efficiency curve CSV")->required();
    presets_curve->add_option("wavelength_nm", curve_wavelength)->required();
    presets_curve->add_option("dark_hz", curve_dark)->required();
    presets_curve->add_option("--jitter-fwhm-ps", curve_jitter);

    auto* rerun = app.add_subcommand("rerun", "Re-run the configuration recorded in a manifest");
    std::string manifest_path, rerun_outdir;
    rerun->add_option("manifest", manifest_path, "manifest.json from a previous run")->required();
    rerun->add_option("-o,--output-dir", rerun_outdir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (hom->parsed()) return execute(build_config(qwsim::Experiment::hom, hom_flags));
        if (cnot->parsed()) {
            RunConfig cfg = build_config(qwsim::Experiment::cnot, cnot_flags);
            if (cnot_overlap >= 0.0) cfg.cnot_overlap = cnot_overlap;
            return execute(cfg);
        }
        if (fringe->parsed()) {
            RunConfig cfg = build_config(qwsim::Experiment::fringe, fringe_flags);
            if (!fringe_mode.empty()) qwsim::apply_override(cfg, "scan.fringe_mode", fringe_mode);
            return execute(cfg);
        }
        if (fom->parsed()) {
            RunConfig cfg = build_config(qwsim::Experiment::fom, fom_flags);
            if (!fom_flags.detector.empty()) cfg.fom_detectors = {fom_flags.detector};
            const int status = execute(cfg);
            print_fom_table(cfg.fom_detectors);
            if (cfg.fom_detectors.size() == 1)
                std::printf("figure of merit (%s): %.4g\n", cfg.fom_detectors[0].c_str(),
                            qwsim::figure_of_merit(qwsim::preset(cfg.fom_detectors[0])));
            std::printf("\nbuilt-in comparison:\n");
            print_fom_table({"sspd", "si_spad"});
            const double ratio = qwsim::figure_of_merit(qwsim::preset("sspd")) /
                                 qwsim::figure_of_merit(qwsim::preset("si_spad"));
            std::printf("sspd / si_spad figure-of-merit ratio: %.3g\n", ratio);
            return status;
        }
        if (presets_list->parsed()) {
            auto models = qwsim::builtin_presets();
            if (!presets_file.empty()) {
                std::ifstream in(presets_file);
                if (!in) throw qwsim::ConfigError("cannot open `" + presets_file + "`");
                for (auto& d : qwsim::read_preset_csv(in)) models.push_back(std::move(d));
            }
            qwsim::write_preset_csv(models, std::cout);
            return 0;
        }
        if (presets_show->parsed()) {
            qwsim::DetectorModel found;
            bool have = false;
            if (!presets_file.empty()) {
                std::ifstream in(presets_file);
                if (!in) throw qwsim::ConfigError("cannot open `" + presets_file + "`");
                for (const auto& d : qwsim::read_preset_csv(in))
                    if (d.label == preset_name) {
                        found = d;
                        have = true;
                    }
            }
            if (!have) found = qwsim::preset(preset_name);
            qwsim::write_preset_csv({found}, std::cout);
            std::printf("eta^2 = %.4g, figure of merit = %.4g\n", qwsim::eta_squared(found),
                        qwsim::figure_of_merit(found));
            return 0;
        }
        if (presets_curve->parsed()) {
            std::ifstream in(curve_file);
            if (!in) throw qwsim::ConfigError("cannot open `" + curve_file + "`");
            const auto curve = qwsim::read_efficiency_curve_csv(in);
            const auto d =
                qwsim::detector_from_curve(curve, curve_wavelength, curve_dark, curve_jitter);
            qwsim::write_preset_csv({d}, std::cout);
            return 0;
        }
        if (rerun->parsed()) {
            RunConfig cfg = qwsim::config_from_manifest(manifest_path);
            cfg.output_dir = rerun_outdir.empty() ? "." : rerun_outdir;
            return execute(cfg);
        }
    } catch (const std::exception& e) {
        const nlohmann::json err{{"error", {{"type", error_kind(e)}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 1;
}
