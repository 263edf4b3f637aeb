#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qwsim/circuits.hpp"
#include "qwsim/detector.hpp"
#include "qwsim/fit.hpp"
#include "qwsim/tcspc.hpp"

namespace qwsim {

enum class RunMode { analytic, mc };

// ---------------------------------------------------------------------------
// Hong-Ou-Mandel delay scan
// ---------------------------------------------------------------------------

struct DipPoint {
    double delay_ps = 0.0;
    double count = 0.0;  // integer-valued in MC mode, expected value in analytic mode
    double error = 0.0;  // sqrt(count)
};

struct DipCurve {
    std::vector<DipPoint> points;
    double acquisition_s = 0.0;
    std::string detector_label;
};

struct HomScanConfig {
    std::vector<double> delays_ps;
    double acquisition_s = 60.0;
    SourceModel source;
    DetectorModel detector1;
    DetectorModel detector2;
    double window_ps = 1000.0;
    TimePs accidental_offset_ps = 100000;
    RunMode mode = RunMode::mc;
    std::uint64_t seed = 1;
    int threads = 1;
    /// The chip under test; any two-mode circuit may replace the default
    /// 50:50 coupler.
    CircuitSpec circuit = build_hom();

    void validate() const;
};

struct HomScanResult {
    DipCurve curve;
    std::vector<double> accidental_counts;  // delayed-window estimate per point
    double singles_rate_1_hz = 0.0;         // measured (MC) or expected (analytic) click rates
    double singles_rate_2_hz = 0.0;
};

HomScanResult run_hom_scan(const HomScanConfig& cfg);

struct DipFit {
    double visibility = 0.0;
    double visibility_sigma = 0.0;
    double center_ps = 0.0;
    double width_ps = 0.0;
    double baseline_counts = 0.0;  // off-dip counts per point
    FitResult raw;
};

/// Weighted least squares of B(1 - V exp(-((t-t0)/w)^2)) over a dip curve.
DipFit fit_dip(const DipCurve& curve);

// ---------------------------------------------------------------------------
// CNOT truth table
// ---------------------------------------------------------------------------

/// Rows = logical inputs |00>..|11>, columns = logical outputs.
using TruthTable = Eigen::Matrix4d;

struct CnotConfig {
    double indistinguishability = 1.0;
    RunMode mode = RunMode::analytic;
    std::uint64_t shots_per_input = 0;  // 0: derived so that sigma_F < 0.01
    DetectorModel detector = preset("sspd");
    std::uint64_t seed = 1;

    void validate() const;
};

struct CnotResult {
    TruthTable table = TruthTable::Zero();
    TruthTable cell_errors = TruthTable::Zero();
    std::array<double, 4> success_probabilities{};
    double fidelity = 0.0;
    double fidelity_sigma = 0.0;
    bool degenerate = false;
    std::array<std::uint64_t, 4> shots_used{};
};

CnotResult run_cnot_truth_table(const CnotConfig& cfg);

/// Mean probability of the ideal CNOT output over the four basis inputs.
double logical_fidelity(const TruthTable& table);

// ---------------------------------------------------------------------------
// Mach-Zehnder fringe scan
// ---------------------------------------------------------------------------

enum class FringeMode { single_photon, two_photon };

struct FringePoint {
    double phase_rad = 0.0;
    double voltage_v = 0.0;  // populated when the scan was specified in volts
    double count = 0.0;
    double error = 0.0;
};

struct FringeCurve {
    std::vector<FringePoint> points;
    FringeMode mode = FringeMode::two_photon;
    double acquisition_s = 0.0;
    bool voltage_scan = false;
};

struct FringeScanConfig {
    std::vector<double> phases_rad;    // used when voltages are absent
    std::vector<double> voltages_v;    // optional; mapped through alpha * v^2
    double alpha_rad_per_v2 = 1.0;
    FringeMode fringe_mode = FringeMode::two_photon;
    double acquisition_s = 10.0;
    SourceModel source;
    DetectorModel detector1;
    DetectorModel detector2;
    double window_ps = 1000.0;
    RunMode mode = RunMode::mc;
    std::uint64_t seed = 1;
    int threads = 1;

    void validate() const;
    std::vector<double> scan_phases() const;
};

FringeCurve run_fringe_scan(const FringeScanConfig& cfg);

struct FringeFit {
    double contrast = 0.0;
    double contrast_sigma = 0.0;
    double period_rad = 0.0;
    double period_sigma = 0.0;
    FitResult raw;
};

/// Fixed-frequency sinusoid fit; k = 1 for single-photon scans, 2 for
/// two-photon scans. Contrast is the fitted fractional amplitude.
FringeFit fringe_contrast(const FringeCurve& curve);

/// Same model with the frequency free; used to compare fringe periods.
FringeFit fit_fringe_period(const FringeCurve& curve);

// ---------------------------------------------------------------------------
// shared analytic machinery
// ---------------------------------------------------------------------------

struct ExpectedRates {
    double singles_1_hz = 0.0;  // detector click rates including darks
    double singles_2_hz = 0.0;
    double true_coincidence_hz = 0.0;  // jitter-capture included
    double accidental_hz = 0.0;

    double total_coincidence_hz() const { return true_coincidence_hz + accidental_hz; }
};

/// Fraction of true coincidences whose jittered click difference still falls
/// inside the window.
double coincidence_capture_fraction(double window_ps, const DetectorModel& d1, const DetectorModel& d2);

/// Expected click and coincidence rates for a pair source driving a two-mode
/// circuit with the given routing.
ExpectedRates expected_rates(const SourceModel& src, const RoutingModel& routing,
                             const DetectorModel& d1, const DetectorModel& d2, double window_ps);

}  // namespace qwsim
