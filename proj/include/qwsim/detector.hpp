#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qwsim/rng.hpp"
#include "qwsim/timestamps.hpp"
#include "qwsim/types.hpp"

namespace qwsim {

/// FWHM-to-sigma conversion for Gaussian jitter.
inline constexpr double kFwhmToSigma = 2.3548;

/// Parametric single-photon detector: efficiency, dark counts, Gaussian
/// timing jitter (given as FWHM) and optional non-paralyzable dead time.
struct DetectorModel {
    double efficiency = 1.0;      // eta in [0, 1]
    double dark_rate_hz = 0.0;    // D
    double jitter_fwhm_ps = 1.0;  // delta t, > 0
    double dead_time_ps = 0.0;
    std::string label;

    double jitter_sigma_ps() const { return jitter_fwhm_ps / kFwhmToSigma; }
    void validate() const;
};

/// Bundled detector presets ("sspd", "si_spad").
DetectorModel preset(const std::string& name);
std::vector<DetectorModel> builtin_presets();

/// eta / (D * delta_t); the signal-to-noise figure of merit. Returns infinity
/// for D = 0 (flagged unbounded rather than an error).
double figure_of_merit(const DetectorModel& d);

double eta_squared(const DetectorModel& d);

/// Push an arrival stream through the detector: Bernoulli(eta) thinning,
/// Gaussian jitter, dark counts over [0, duration], dead-time filtering, and
/// quantization to the 4 ps counting-card grid. Same-bin clicks collapse to
/// one record, as a single timestamp register would.
TimestampStream apply_detector(const TimestampStream& arrivals, const DetectorModel& d,
                               double duration_s, Rng& rng);

/// `label,efficiency,dark_hz,jitter_fwhm_ps,dead_time_ps` rows.
std::vector<DetectorModel> read_preset_csv(std::istream& in);
void write_preset_csv(const std::vector<DetectorModel>& models, std::ostream& out);

/// Measured system efficiency versus ungated dark count rate, one curve per
/// wavelength. Ingested data; nothing about the device physics is modeled.
struct EfficiencyCurve {
    struct Point {
        double dark_hz;
        double efficiency;
    };
    struct Series {
        double wavelength_nm;
        std::vector<Point> points;  // sorted by dark rate
    };
    std::vector<Series> series;
};

/// `wavelength_nm,dark_hz,efficiency` rows.
EfficiencyCurve read_efficiency_curve_csv(std::istream& in);

/// Detector model at a bias point read off a measured curve: efficiency
/// interpolated (linear in log dark rate) at the requested dark rate.
DetectorModel detector_from_curve(const EfficiencyCurve& curve, double wavelength_nm,
                                  double dark_hz, double jitter_fwhm_ps,
                                  double dead_time_ps = 0.0);

}  // namespace qwsim
