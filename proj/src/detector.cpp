#include "qwsim/detector.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace qwsim {

void DetectorModel::validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0))
        throw std::domain_error("DetectorModel: efficiency must be in [0, 1]");
    if (!(dark_rate_hz >= 0.0)) throw std::domain_error("DetectorModel: dark rate must be >= 0");
    if (!(jitter_fwhm_ps > 0.0)) throw std::domain_error("DetectorModel: jitter must be > 0");
    if (!(dead_time_ps >= 0.0)) throw std::domain_error("DetectorModel: dead time must be >= 0");
}

DetectorModel preset(const std::string& name) {
    for (const auto& d : builtin_presets())
        if (d.label == name) return d;
    throw std::out_of_range("preset: unknown detector preset `" + name + "`");
}

std::vector<DetectorModel> builtin_presets() {
    // SSPD characterized at 830 nm, Si SPAD from manufacturer data at 804 nm.
    return {
        DetectorModel{0.10, 20.0, 60.0, 0.0, "sspd"},
        DetectorModel{0.45, 200.0, 350.0, 0.0, "si_spad"},
    };
}

double figure_of_merit(const DetectorModel& d) {
    d.validate();
    if (d.dark_rate_hz == 0.0) return std::numeric_limits<double>::infinity();
    return d.efficiency / (d.dark_rate_hz * d.jitter_fwhm_ps * 1e-12);
}

double eta_squared(const DetectorModel& d) { return d.efficiency * d.efficiency; }

namespace {

TimePs quantize_to_grid(TimePs t_ps) {
    return (t_ps + kCardGridPs / 2) / kCardGridPs * kCardGridPs;
}

/// Jitter only perturbs neighbours, so click vectors arrive almost sorted;
/// repair with bounded insertion moves and fall back to std::sort if the
/// stream turns out to be genuinely shuffled.
void repair_sort(std::vector<TimePs>& v) {
    std::size_t displaced = 0;
    const std::size_t limit = v.size() / 8 + 64;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i - 1] <= v[i]) continue;
        if (++displaced > limit) {
            std::sort(v.begin(), v.end());
            return;
        }
        const TimePs x = v[i];
        std::size_t j = i;
        while (j > 0 && v[j - 1] > x) {
            v[j] = v[j - 1];
            --j;
        }
        v[j] = x;
    }
}

}  // namespace

TimestampStream apply_detector(const TimestampStream& arrivals, const DetectorModel& d,
                               double duration_s, Rng& rng) {
    d.validate();
    require_sorted(arrivals, "apply_detector");
    const double sigma = d.jitter_sigma_ps();
    const double duration_ps = duration_s * kPicosecondsPerSecond;
    const double t_max = duration_ps + 5.0 * sigma;

    std::vector<TimePs> photon_clicks;
    photon_clicks.reserve(static_cast<std::size_t>(
        static_cast<double>(arrivals.size()) * d.efficiency) + 64);
    for (TimePs t : arrivals.times) {
        if (!rng.bernoulli(d.efficiency)) continue;
        const double shifted = std::clamp(static_cast<double>(t) + sigma * rng.normal(), 0.0, t_max);
        photon_clicks.push_back(static_cast<TimePs>(std::llround(shifted)));
    }
    repair_sort(photon_clicks);

    // dark counts: homogeneous Poisson process over [0, duration]
    std::vector<TimePs> dark_clicks;
    if (d.dark_rate_hz > 0.0) {
        dark_clicks.reserve(static_cast<std::size_t>(d.dark_rate_hz * duration_s) + 16);
        const double mean_gap_ps = kPicosecondsPerSecond / d.dark_rate_hz;
        double t = rng.exponential(mean_gap_ps);
        while (t < duration_ps) {
            dark_clicks.push_back(static_cast<TimePs>(std::llround(t)));
            t += rng.exponential(mean_gap_ps);
        }
    }

    // merge, dead-time filter, snap survivors to the card grid
    TimestampStream out;
    out.channel = arrivals.channel;
    out.times.reserve(photon_clicks.size() + dark_clicks.size());
    const auto dead = static_cast<TimePs>(std::llround(d.dead_time_ps));
    TimePs last_accepted = std::numeric_limits<TimePs>::min();
    TimePs last_emitted = std::numeric_limits<TimePs>::min();
    bool first = true;
    std::size_t i = 0, j = 0;
    while (i < photon_clicks.size() || j < dark_clicks.size()) {
        TimePs t;
        if (j >= dark_clicks.size() || (i < photon_clicks.size() && photon_clicks[i] <= dark_clicks[j]))
            t = photon_clicks[i++];
        else
            t = dark_clicks[j++];
        if (!first && t - last_accepted < dead) continue;
        first = false;
        last_accepted = t;
        const TimePs snapped = quantize_to_grid(t);
        if (snapped == last_emitted) continue;
        last_emitted = snapped;
        out.times.push_back(snapped);
    }
    return out;
}

std::vector<DetectorModel> read_preset_csv(std::istream& in) {
    std::vector<DetectorModel> out;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("preset csv: empty file");
    if (line != "label,efficiency,dark_hz,jitter_fwhm_ps,dead_time_ps")
        throw ConfigError("preset csv: unexpected header `" + line + "`");
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        DetectorModel d;
        std::string field;
        try {
            std::getline(row, d.label, ',');
            std::getline(row, field, ',');
            d.efficiency = std::stod(field);
            std::getline(row, field, ',');
            d.dark_rate_hz = std::stod(field);
            std::getline(row, field, ',');
            d.jitter_fwhm_ps = std::stod(field);
            std::getline(row, field, ',');
            d.dead_time_ps = std::stod(field);
            d.validate();
        } catch (const std::exception& e) {
            throw ConfigError("preset csv line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(std::move(d));
    }
    return out;
}

void write_preset_csv(const std::vector<DetectorModel>& models, std::ostream& out) {
    out << "label,efficiency,dark_hz,jitter_fwhm_ps,dead_time_ps\n";
    for (const auto& d : models)
        out << d.label << "," << d.efficiency << "," << d.dark_rate_hz << ","
            << d.jitter_fwhm_ps << "," << d.dead_time_ps << "\n";
}

EfficiencyCurve read_efficiency_curve_csv(std::istream& in) {
    EfficiencyCurve curve;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("efficiency csv: empty file");
    if (line != "wavelength_nm,dark_hz,efficiency")
        throw ConfigError("efficiency csv: unexpected header `" + line + "`");
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        try {
            std::getline(row, field, ',');
            const double wl = std::stod(field);
            std::getline(row, field, ',');
            const double dark = std::stod(field);
            std::getline(row, field, ',');
            const double eff = std::stod(field);
            if (!(eff >= 0.0 && eff <= 1.0)) throw std::domain_error("efficiency outside [0, 1]");
            auto it = std::find_if(curve.series.begin(), curve.series.end(),
                                   [&](const auto& s) { return s.wavelength_nm == wl; });
            if (it == curve.series.end()) {
                curve.series.push_back({wl, {}});
                it = std::prev(curve.series.end());
            }
            it->points.push_back({dark, eff});
        } catch (const std::exception& e) {
            throw ConfigError("efficiency csv line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    for (auto& s : curve.series)
        std::sort(s.points.begin(), s.points.end(),
                  [](const auto& a, const auto& b) { return a.dark_hz < b.dark_hz; });
    return curve;
}

DetectorModel detector_from_curve(const EfficiencyCurve& curve, double wavelength_nm,
                                  double dark_hz, double jitter_fwhm_ps, double dead_time_ps) {
    const auto it = std::find_if(curve.series.begin(), curve.series.end(),
                                 [&](const auto& s) { return s.wavelength_nm == wavelength_nm; });
    if (it == curve.series.end())
        throw std::out_of_range("detector_from_curve: no series at requested wavelength");
    const auto& pts = it->points;
    if (pts.size() < 2) throw std::out_of_range("detector_from_curve: need at least two points");
    if (dark_hz < pts.front().dark_hz || dark_hz > pts.back().dark_hz)
        throw std::out_of_range("detector_from_curve: dark rate outside measured range");
    std::size_t hi = 1;
    while (pts[hi].dark_hz < dark_hz) ++hi;
    const auto& p0 = pts[hi - 1];
    const auto& p1 = pts[hi];
    const double f = p1.dark_hz == p0.dark_hz
                         ? 0.0
                         : (std::log(dark_hz) - std::log(p0.dark_hz)) /
                               (std::log(p1.dark_hz) - std::log(p0.dark_hz));
    const double eff = p0.efficiency + f * (p1.efficiency - p0.efficiency);
    std::ostringstream label;
    label << "curve_" << wavelength_nm << "nm@" << dark_hz << "Hz";
    DetectorModel d{eff, dark_hz, jitter_fwhm_ps, dead_time_ps, label.str()};
    d.validate();
    return d;
}

}  // namespace qwsim
