#include "qwsim/config.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qwsim {

using nlohmann::json;

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::hom: return "hom";
        case Experiment::cnot: return "cnot";
        case Experiment::fringe: return "fringe";
        case Experiment::fom: return "fom";
    }
    return "?";
}

Experiment experiment_from_string(const std::string& name) {
    if (name == "hom") return Experiment::hom;
    if (name == "cnot") return Experiment::cnot;
    if (name == "fringe") return Experiment::fringe;
    if (name == "fom") return Experiment::fom;
    throw ConfigError("experiment: expected hom|cnot|fringe|fom, got `" + name + "`");
}

namespace {

std::string to_string(RunMode m) { return m == RunMode::analytic ? "analytic" : "mc"; }

RunMode mode_from_string(const std::string& name) {
    if (name == "analytic") return RunMode::analytic;
    if (name == "mc") return RunMode::mc;
    throw ConfigError("mode: expected analytic|mc, got `" + name + "`");
}

std::string to_string(FringeMode m) {
    return m == FringeMode::two_photon ? "two_photon" : "single_photon";
}

FringeMode fringe_mode_from_string(const std::string& name) {
    if (name == "two_photon") return FringeMode::two_photon;
    if (name == "single_photon") return FringeMode::single_photon;
    throw ConfigError("fringe_mode: expected single_photon|two_photon, got `" + name + "`");
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got `" + value + "`");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::uint64_t x = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an unsigned integer, got `" + value + "`");
    }
}

/// Grid values: either `a,b,c` or an inclusive range `start:stop:step`.
std::vector<double> parse_grid(const std::string& key, const std::string& value) {
    std::vector<double> out;
    if (value.find(':') != std::string::npos) {
        std::istringstream ss(value);
        std::string a, b, c;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
            throw ConfigError(key + ": range must be start:stop:step");
        const double start = parse_double(key, a);
        const double stop = parse_double(key, b);
        const double step = parse_double(key, c);
        if (!(step > 0.0) || stop < start) throw ConfigError(key + ": bad range bounds");
        for (double x = start; x <= stop + step * 0.5; x += step) out.push_back(x);
        return out;
    }
    std::istringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError(key + ": empty grid");
    return out;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct RawEntry {
    std::string section;
    std::string key;
    std::string value;
    int line;
};

std::vector<RawEntry> read_entries(std::istream& in) {
    std::vector<RawEntry> entries;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        entries.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no});
    }
    return entries;
}

void apply_detector_key(DetectorModel& d, const std::string& path, const std::string& key,
                        const std::string& value) {
    if (key == "preset") {
        d = preset(value);
    } else if (key == "preset_file") {
        std::ifstream file(value);
        if (!file) throw ConfigError(path + ".preset_file: cannot open `" + value + "`");
        const auto models = read_preset_csv(file);
        if (models.empty()) throw ConfigError(path + ".preset_file: no presets in `" + value + "`");
        d = models.front();
    } else if (key == "efficiency") {
        d.efficiency = parse_double(path + ".efficiency", value);
    } else if (key == "dark_hz") {
        d.dark_rate_hz = parse_double(path + ".dark_hz", value);
    } else if (key == "jitter_fwhm_ps") {
        d.jitter_fwhm_ps = parse_double(path + ".jitter_fwhm_ps", value);
    } else if (key == "dead_time_ps") {
        d.dead_time_ps = parse_double(path + ".dead_time_ps", value);
    } else if (key == "label") {
        d.label = value;
    } else {
        throw ConfigError(path + "." + key + ": unknown key");
    }
}

void apply_entry(RunConfig& cfg, const std::string& section, const std::string& key,
                 const std::string& value) {
    const std::string path = section.empty() ? key : section + "." + key;
    if (section.empty()) {
        if (key == "experiment") {
            cfg.experiment = experiment_from_string(value);
        } else if (key == "mode") {
            cfg.mode = mode_from_string(value);
        } else if (key == "seed") {
            cfg.seed = parse_u64(path, value);
            cfg.seed_was_explicit = true;
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(parse_u64(path, value));
            if (cfg.threads < 1) throw ConfigError("threads: must be >= 1");
        } else if (key == "detector") {
            cfg.detector1 = preset(value);
            cfg.detector2 = preset(value);
        } else {
            throw ConfigError(path + ": unknown key");
        }
    } else if (section == "source") {
        if (key == "pair_rate_hz") cfg.source.pair_rate_hz = parse_double(path, value);
        else if (key == "coupling") cfg.source.coupling = parse_double(path, value);
        else if (key == "max_overlap") cfg.source.intrinsic_overlap.max_overlap = parse_double(path, value);
        else if (key == "coherence_ps") cfg.source.intrinsic_overlap.coherence_time_ps = parse_double(path, value);
        else if (key == "background_hz") cfg.source.background_hz = parse_double(path, value);
        else throw ConfigError(path + ": unknown key");
    } else if (section == "detector1") {
        apply_detector_key(cfg.detector1, section, key, value);
    } else if (section == "detector2") {
        apply_detector_key(cfg.detector2, section, key, value);
    } else if (section == "scan") {
        if (key == "delays_ps") cfg.delays_ps = parse_grid(path, value);
        else if (key == "phases_rad") cfg.phases_rad = parse_grid(path, value);
        else if (key == "voltages_v") cfg.voltages_v = parse_grid(path, value);
        else if (key == "alpha_rad_per_v2") cfg.alpha_rad_per_v2 = parse_double(path, value);
        else if (key == "acquisition_s") cfg.acquisition_s = parse_double(path, value);
        else if (key == "window_ps") cfg.window_ps = parse_double(path, value);
        else if (key == "accidental_offset_ps")
            cfg.accidental_offset_ps = static_cast<TimePs>(parse_u64(path, value));
        else if (key == "fringe_mode") cfg.fringe_mode = fringe_mode_from_string(value);
        else if (key == "circuit_file") {
            std::ifstream file(value);
            if (!file) throw ConfigError(path + ": cannot open `" + value + "`");
            std::ostringstream text;
            text << file.rdbuf();
            std::istringstream reparse(text.str());
            cfg.circuit_text = format_circuit(parse_circuit(reparse, "custom"));
        }
        else throw ConfigError(path + ": unknown key");
    } else if (section == "cnot") {
        if (key == "overlap") cfg.cnot_overlap = parse_double(path, value);
        else if (key == "shots") cfg.cnot_shots = parse_u64(path, value);
        else throw ConfigError(path + ": unknown key");
    } else if (section == "fom") {
        if (key == "detectors") {
            cfg.fom_detectors.clear();
            std::istringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) cfg.fom_detectors.push_back(trim(item));
        } else {
            throw ConfigError(path + ": unknown key");
        }
    } else {
        throw ConfigError("[" + section + "]: unknown section");
    }
}

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void RunConfig::validate() const {
    switch (experiment) {
        case Experiment::hom:
            hom_config().validate();
            break;
        case Experiment::fringe:
            fringe_config().validate();
            break;
        case Experiment::cnot:
            cnot_config().validate();
            break;
        case Experiment::fom:
            if (fom_detectors.empty()) throw ConfigError("fom.detectors: empty list");
            for (const auto& name : fom_detectors) preset(name);
            break;
    }
    if (threads < 1) throw ConfigError("threads: must be >= 1");
}

HomScanConfig RunConfig::hom_config() const {
    HomScanConfig h;
    if (!circuit_text.empty()) {
        std::istringstream in(circuit_text);
        h.circuit = parse_circuit(in, "custom");
    }
    h.delays_ps = delays_ps;
    h.acquisition_s = acquisition_s;
    h.source = source;
    h.detector1 = detector1;
    h.detector2 = detector2;
    h.window_ps = window_ps;
    h.accidental_offset_ps = accidental_offset_ps;
    h.mode = mode;
    h.seed = seed;
    h.threads = threads;
    return h;
}

FringeScanConfig RunConfig::fringe_config() const {
    FringeScanConfig f;
    f.phases_rad = phases_rad;
    f.voltages_v = voltages_v;
    f.alpha_rad_per_v2 = alpha_rad_per_v2;
    f.fringe_mode = fringe_mode;
    f.acquisition_s = acquisition_s;
    f.source = source;
    f.detector1 = detector1;
    f.detector2 = detector2;
    f.window_ps = window_ps;
    f.mode = mode;
    f.seed = seed;
    f.threads = threads;
    return f;
}

CnotConfig RunConfig::cnot_config() const {
    CnotConfig c;
    c.indistinguishability = cnot_overlap;
    c.mode = mode;
    c.shots_per_input = cnot_shots;
    c.detector = detector1;
    c.seed = seed;
    return c;
}

RunConfig parse_config(std::istream& in) {
    const auto entries = read_entries(in);
    // experiment and detector choice pick the calibrated default base
    std::string experiment_name, detector_name = "sspd";
    for (const auto& e : entries) {
        if (e.section.empty() && e.key == "experiment") experiment_name = e.value;
        if (e.section.empty() && e.key == "detector") detector_name = e.value;
    }
    if (experiment_name.empty()) throw ConfigError("config: missing `experiment =` key");
    preset(detector_name);  // resolves, throws on unknown preset
    RunConfig cfg = paper_defaults(experiment_from_string(experiment_name), detector_name);
    cfg.seed_was_explicit = false;
    for (const auto& e : entries) {
        try {
            apply_entry(cfg, e.section, e.key, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError("line " + std::to_string(e.line) + ": " + err.what());
        }
    }
    if (!cfg.seed_was_explicit) cfg.seed = entropy_seed();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open `" + path + "`");
    return parse_config(in);
}

void apply_override(RunConfig& cfg, const std::string& dotted_key, const std::string& value) {
    const auto dot = dotted_key.find('.');
    const std::string section = dot == std::string::npos ? "" : dotted_key.substr(0, dot);
    const std::string key = dot == std::string::npos ? dotted_key : dotted_key.substr(dot + 1);
    apply_entry(cfg, section, key, value);
}

// ---------------------------------------------------------------------------
// calibrated defaults
// ---------------------------------------------------------------------------

namespace {

// Calibration targets for the default configuration. Pair rate is set so the
// simulated Si SPAD off-dip coincidence rate lands at 275 / s (which puts the
// SSPD near 14 / s through the eta^2 ratio); the per-channel background flux
// is set so the analytic accidental rate at the default 1 ns window matches
// the floors below for each detector type.
constexpr double kSpadOffDipRateHz = 275.0;
constexpr double kAccidentalSspdHz = 0.01;
constexpr double kAccidentalSpadHz = 5.0;
constexpr double kHomMaxOverlap = 0.926;
constexpr double kFringeContrastTarget = 0.818;
constexpr double kCnotFidelityTarget = 0.904;
constexpr double kDefaultWindowPs = 1000.0;
constexpr double kDefaultCoupling = 0.7;

double calibrated_pair_rate() {
    const DetectorModel spad = preset("si_spad");
    const double capture = coincidence_capture_fraction(kDefaultWindowPs, spad, spad);
    const double c = kDefaultCoupling;
    return (kSpadOffDipRateHz - kAccidentalSpadHz) /
           (c * c * 0.5 * eta_squared(spad) * capture);
}

double calibrated_background(const DetectorModel& d, double accidental_hz, double pair_rate) {
    const double singles = std::sqrt(accidental_hz / (kDefaultWindowPs * 1e-12));
    const double flux = (singles - d.dark_rate_hz) / d.efficiency;
    return flux - pair_rate * kDefaultCoupling;
}

}  // namespace

double fringe_overlap_for_contrast(double contrast) {
    // coincidence probability of the interferometer at pair overlap I is
    // I (1 + cos 2phi)/2 + (1 - I)(3 + cos 2phi)/4, i.e. amplitude (1 + I)/4
    // over offset (3 - I)/4, so C = (1 + I)/(3 - I).
    if (!(contrast > 0.0 && contrast <= 1.0))
        throw std::domain_error("fringe_overlap_for_contrast: contrast must be in (0, 1]");
    return (3.0 * contrast - 1.0) / (1.0 + contrast);
}

double cnot_overlap_for_fidelity(double fidelity) {
    if (!(fidelity > 0.0 && fidelity <= 1.0))
        throw std::domain_error("cnot_overlap_for_fidelity: fidelity must be in (0, 1]");
    auto f_of = [](double indist) {
        CnotConfig c;
        c.indistinguishability = indist;
        c.mode = RunMode::analytic;
        return run_cnot_truth_table(c).fidelity;
    };
    double lo = 0.0, hi = 1.0;
    if (f_of(lo) >= fidelity) return lo;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f_of(mid) < fidelity ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

RunConfig paper_defaults(Experiment experiment, const std::string& detector) {
    RunConfig cfg;
    cfg.experiment = experiment;
    cfg.seed = 1;
    cfg.window_ps = kDefaultWindowPs;
    cfg.source.coupling = kDefaultCoupling;
    cfg.source.pair_rate_hz = calibrated_pair_rate();
    cfg.source.intrinsic_overlap = {kHomMaxOverlap, 1.0};

    const DetectorModel d = preset(detector);
    cfg.detector1 = d;
    cfg.detector2 = d;
    const double accidental_target =
        detector == "si_spad" ? kAccidentalSpadHz : kAccidentalSspdHz;
    cfg.source.background_hz =
        calibrated_background(d, accidental_target, cfg.source.pair_rate_hz);

    switch (experiment) {
        case Experiment::hom: {
            // shoulder points out to +-4 ps, densified through the dip
            cfg.delays_ps = parse_grid(
                "delays",
                "-4,-3.2,-2.6,-2,-1.6,-1.2,-0.9,-0.7,-0.5,-0.35,-0.2,-0.1,0,"
                "0.1,0.2,0.35,0.5,0.7,0.9,1.2,1.6,2,2.6,3.2,4");
            cfg.acquisition_s = detector == "si_spad" ? 40.0 : 60.0;
            cfg.mode = RunMode::mc;
            break;
        }
        case Experiment::fringe: {
            cfg.phases_rad = parse_grid("phases", "0:6.3:0.19635");  // pi/16 steps over 2 pi
            cfg.acquisition_s = 10.0;
            cfg.fringe_mode = FringeMode::two_photon;
            cfg.source.intrinsic_overlap.max_overlap = fringe_overlap_for_contrast(kFringeContrastTarget);
            cfg.mode = RunMode::mc;
            break;
        }
        case Experiment::cnot: {
            cfg.cnot_overlap = cnot_overlap_for_fidelity(kCnotFidelityTarget);
            cfg.mode = RunMode::analytic;
            break;
        }
        case Experiment::fom:
            break;
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

json detector_to_json(const DetectorModel& d) {
    return json{{"efficiency", d.efficiency},
                {"dark_hz", d.dark_rate_hz},
                {"jitter_fwhm_ps", d.jitter_fwhm_ps},
                {"dead_time_ps", d.dead_time_ps},
                {"label", d.label}};
}

DetectorModel detector_from_json(const json& j) {
    DetectorModel d;
    d.efficiency = j.at("efficiency").get<double>();
    d.dark_rate_hz = j.at("dark_hz").get<double>();
    d.jitter_fwhm_ps = j.at("jitter_fwhm_ps").get<double>();
    d.dead_time_ps = j.at("dead_time_ps").get<double>();
    d.label = j.at("label").get<std::string>();
    return d;
}

json config_to_json_object(const RunConfig& cfg) {
    return json{
        {"experiment", to_string(cfg.experiment)},
        {"mode", to_string(cfg.mode)},
        {"seed", cfg.seed},
        {"threads", cfg.threads},
        {"source",
         {{"pair_rate_hz", cfg.source.pair_rate_hz},
          {"coupling", cfg.source.coupling},
          {"max_overlap", cfg.source.intrinsic_overlap.max_overlap},
          {"coherence_ps", cfg.source.intrinsic_overlap.coherence_time_ps},
          {"background_hz", cfg.source.background_hz}}},
        {"detector1", detector_to_json(cfg.detector1)},
        {"detector2", detector_to_json(cfg.detector2)},
        {"window_ps", cfg.window_ps},
        {"accidental_offset_ps", cfg.accidental_offset_ps},
        {"delays_ps", cfg.delays_ps},
        {"acquisition_s", cfg.acquisition_s},
        {"circuit_text", cfg.circuit_text},
        {"phases_rad", cfg.phases_rad},
        {"voltages_v", cfg.voltages_v},
        {"alpha_rad_per_v2", cfg.alpha_rad_per_v2},
        {"fringe_mode", to_string(cfg.fringe_mode)},
        {"cnot_overlap", cfg.cnot_overlap},
        {"cnot_shots", cfg.cnot_shots},
        {"fom_detectors", cfg.fom_detectors},
    };
}

RunConfig config_from_json_object(const json& j) {
    RunConfig cfg;
    cfg.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    cfg.mode = mode_from_string(j.at("mode").get<std::string>());
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.seed_was_explicit = true;
    cfg.threads = j.at("threads").get<int>();
    const auto& src = j.at("source");
    cfg.source.pair_rate_hz = src.at("pair_rate_hz").get<double>();
    cfg.source.coupling = src.at("coupling").get<double>();
    cfg.source.intrinsic_overlap.max_overlap = src.at("max_overlap").get<double>();
    cfg.source.intrinsic_overlap.coherence_time_ps = src.at("coherence_ps").get<double>();
    cfg.source.background_hz = src.at("background_hz").get<double>();
    cfg.detector1 = detector_from_json(j.at("detector1"));
    cfg.detector2 = detector_from_json(j.at("detector2"));
    cfg.window_ps = j.at("window_ps").get<double>();
    cfg.accidental_offset_ps = j.at("accidental_offset_ps").get<TimePs>();
    cfg.delays_ps = j.at("delays_ps").get<std::vector<double>>();
    cfg.acquisition_s = j.at("acquisition_s").get<double>();
    cfg.circuit_text = j.at("circuit_text").get<std::string>();
    cfg.phases_rad = j.at("phases_rad").get<std::vector<double>>();
    cfg.voltages_v = j.at("voltages_v").get<std::vector<double>>();
    cfg.alpha_rad_per_v2 = j.at("alpha_rad_per_v2").get<double>();
    cfg.fringe_mode = fringe_mode_from_string(j.at("fringe_mode").get<std::string>());
    cfg.cnot_overlap = j.at("cnot_overlap").get<double>();
    cfg.cnot_shots = j.at("cnot_shots").get<std::uint64_t>();
    cfg.fom_detectors = j.at("fom_detectors").get<std::vector<std::string>>();
    return cfg;
}

}  // namespace

std::string config_to_json(const RunConfig& cfg) { return config_to_json_object(cfg).dump(2); }

std::string config_hash(const RunConfig& cfg) {
    const std::string text = config_to_json_object(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// artifact writing
// ---------------------------------------------------------------------------

namespace {

struct Artifacts {
    std::vector<std::string> csv_columns;
    std::string results_csv;
    json fit;  // null when the experiment has no fitted summary
};

Artifacts run_hom(const RunConfig& cfg) {
    const HomScanResult result = run_hom_scan(cfg.hom_config());
    Artifacts a;
    a.csv_columns = {"delay_ps", "count", "error", "duration_s"};
    std::ostringstream csv;
    csv << "delay_ps,count,error,duration_s\n";
    for (const auto& pt : result.curve.points)
        csv << format_double(pt.delay_ps) << "," << format_double(pt.count) << ","
            << format_double(pt.error) << "," << format_double(result.curve.acquisition_s) << "\n";
    a.results_csv = csv.str();

    const DipFit fit = fit_dip(result.curve);
    double acc_mean = 0.0;
    for (double n : result.accidental_counts) acc_mean += n;
    acc_mean /= static_cast<double>(result.accidental_counts.size());

    // corrected visibility: subtract the accidental estimate and refit
    DipCurve corrected = result.curve;
    for (auto& pt : corrected.points) pt.count = std::max(pt.count - acc_mean, 0.0);
    const DipFit corrected_fit = fit_dip(corrected);

    a.fit = json{{"visibility", fit.visibility},
                 {"visibility_sigma", fit.visibility_sigma},
                 {"center_ps", fit.center_ps},
                 {"width_ps", fit.width_ps},
                 {"baseline_counts", fit.baseline_counts},
                 {"baseline_rate_hz", fit.baseline_counts / result.curve.acquisition_s},
                 {"corrected_visibility", corrected_fit.visibility},
                 {"corrected_visibility_sigma", corrected_fit.visibility_sigma},
                 {"accidental_counts_mean", acc_mean},
                 {"accidental_rate_hz", acc_mean / result.curve.acquisition_s},
                 {"singles_rate_1_hz", result.singles_rate_1_hz},
                 {"singles_rate_2_hz", result.singles_rate_2_hz}};
    return a;
}

Artifacts run_fringe(const RunConfig& cfg) {
    const FringeCurve curve = run_fringe_scan(cfg.fringe_config());
    Artifacts a;
    std::ostringstream csv;
    if (curve.voltage_scan) {
        a.csv_columns = {"voltage_v", "phase_rad", "count", "error", "duration_s"};
        csv << "voltage_v,phase_rad,count,error,duration_s\n";
        for (const auto& pt : curve.points)
            csv << format_double(pt.voltage_v) << "," << format_double(pt.phase_rad) << ","
                << format_double(pt.count) << "," << format_double(pt.error) << ","
                << format_double(curve.acquisition_s) << "\n";
    } else {
        a.csv_columns = {"phase_rad", "count", "error", "duration_s"};
        csv << "phase_rad,count,error,duration_s\n";
        for (const auto& pt : curve.points)
            csv << format_double(pt.phase_rad) << "," << format_double(pt.count) << ","
                << format_double(pt.error) << "," << format_double(curve.acquisition_s) << "\n";
    }
    a.results_csv = csv.str();

    const FringeFit fixed = fringe_contrast(curve);
    const FringeFit free = fit_fringe_period(curve);
    a.fit = json{{"contrast", fixed.contrast},
                 {"contrast_sigma", fixed.contrast_sigma},
                 {"fixed_period_rad", fixed.period_rad},
                 {"fitted_period_rad", free.period_rad},
                 {"fitted_period_sigma", free.period_sigma},
                 {"mode", to_string(curve.mode)}};
    return a;
}

Artifacts run_cnot(const RunConfig& cfg) {
    const CnotResult result = run_cnot_truth_table(cfg.cnot_config());
    Artifacts a;
    a.csv_columns = {"input", "output", "probability", "error"};
    static const char* kBasis[4] = {"00", "01", "10", "11"};
    std::ostringstream csv;
    csv << "input,output,probability,error\n";
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            csv << kBasis[r] << "," << kBasis[c] << "," << format_double(result.table(r, c)) << ","
                << format_double(result.cell_errors(r, c)) << "\n";
    a.results_csv = csv.str();
    a.fit = json{{"fidelity", result.fidelity},
                 {"fidelity_sigma", result.fidelity_sigma},
                 {"success_probabilities", result.success_probabilities},
                 {"degenerate", result.degenerate},
                 {"shots_used", result.shots_used},
                 {"indistinguishability", cfg.cnot_overlap}};
    return a;
}

Artifacts run_fom(const RunConfig& cfg) {
    Artifacts a;
    a.csv_columns = {"label", "efficiency", "dark_hz", "jitter_fwhm_ps",
                     "eta_squared", "figure_of_merit"};
    std::ostringstream csv;
    csv << "label,efficiency,dark_hz,jitter_fwhm_ps,eta_squared,figure_of_merit\n";
    for (const auto& name : cfg.fom_detectors) {
        const DetectorModel d = preset(name);
        csv << d.label << "," << format_double(d.efficiency) << ","
            << format_double(d.dark_rate_hz) << "," << format_double(d.jitter_fwhm_ps) << ","
            << format_double(eta_squared(d)) << "," << format_double(figure_of_merit(d)) << "\n";
    }
    a.results_csv = csv.str();
    return a;
}

}  // namespace

std::vector<std::string> run_experiment(const RunConfig& cfg) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();
    Artifacts artifacts;
    switch (cfg.experiment) {
        case Experiment::hom: artifacts = run_hom(cfg); break;
        case Experiment::fringe: artifacts = run_fringe(cfg); break;
        case Experiment::cnot: artifacts = run_cnot(cfg); break;
        case Experiment::fom: artifacts = run_fom(cfg); break;
    }
    const double runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const fs::path dir(cfg.output_dir);
    std::vector<std::string> written;

    {
        std::ofstream out(dir / "results.csv", std::ios::binary);
        out << artifacts.results_csv;
        written.push_back((dir / "results.csv").string());
    }
    if (!artifacts.fit.is_null()) {
        std::ofstream out(dir / "fit.json", std::ios::binary);
        out << artifacts.fit.dump(2) << "\n";
        written.push_back((dir / "fit.json").string());
    }
    {
        json manifest{
            {"schema_version", 1},
            {"experiment", to_string(cfg.experiment)},
            {"mode", cfg.mode == RunMode::analytic ? "analytic" : "mc"},
            {"seed", cfg.seed},
            {"config", config_to_json_object(cfg)},
            {"config_hash", config_hash(cfg)},
            {"csv_columns", artifacts.csv_columns},
            {"detector_labels", {cfg.detector1.label, cfg.detector2.label}},
            {"fit", artifacts.fit},
            {"runtime_s", runtime_s},
        };
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << "\n";
        written.push_back((dir / "manifest.json").string());
    }
    return written;
}

RunConfig config_from_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("manifest: cannot open `" + manifest_path + "`");
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest: parse failure: ") + e.what());
    }
    return config_from_json_object(manifest.at("config"));
}

}  // namespace qwsim
