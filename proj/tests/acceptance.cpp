// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. The Monte Carlo criteria run at a documented desk scale;
// see the notes printed next to each line.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "qwsim/config.hpp"
#include "qwsim/experiments.hpp"

using namespace qwsim;

namespace {

constexpr std::uint64_t kMasterSeed = 20100401;

int failures = 0;

void report(int criterion, bool pass, const std::string& text) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, text.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// --------------------------------------------------------------------------

void criterion_1_permanent_oracle() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(kMasterSeed);
    double max_dev = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + static_cast<int>(rng.below(5));  // up to 6 modes
        const int n = 1 + static_cast<int>(rng.below(3));  // up to 3 photons
        const Matrix u = oracle::haar_unitary(m, rng);
        const FockState input = oracle::random_state(m, n, rng);
        const Distribution fast = output_distribution(ModeUnitary{u}, input);
        const auto reference = oracle::feynman_distribution(u, input);
        for (const auto& [state, p] : fast) {
            const auto it = reference.find(state);
            const double expected = it == reference.end() ? 0.0 : it->second;
            max_dev = std::max(max_dev, std::abs(p - expected));
        }
    }
    const double elapsed = seconds_since(start);
    report(1, max_dev < 1e-10 && elapsed < 10.0,
           fmt("permanent distributions match path enumeration on 100 random unitaries "
               "(max deviation %.2e, %.2f s)",
               max_dev, elapsed));
}

void criterion_2_hom_exactness() {
    const ModeUnitary u = to_unitary(build_hom());
    const Distribution dist = output_distribution(u, FockState({1, 1}));
    const double coincidence = dist.at(FockState({1, 1}));
    const double bunch_a = dist.at(FockState({2, 0}));
    const double bunch_b = dist.at(FockState({0, 2}));
    const bool pass = coincidence < 1e-12 && std::abs(bunch_a - 0.5) < 1e-12 &&
                      std::abs(bunch_b - 0.5) < 1e-12;
    report(2, pass,
           fmt("50:50 coupler on |1,1>: coincidence %.2e, bunching %.15f / %.15f", coincidence,
               bunch_a, bunch_b));
}

void criterion_3_figures_of_merit() {
    const double fom_sspd = figure_of_merit(preset("sspd"));
    const double fom_spad = figure_of_merit(preset("si_spad"));
    const double ratio = fom_sspd / fom_spad;
    const bool pass = std::abs(fom_sspd / 8.3e7 - 1.0) < 0.005 &&
                      std::abs(fom_spad / 6.43e6 - 1.0) < 0.005 && ratio > 10.0;
    report(3, pass,
           fmt("figures of merit sspd %.4g (8.3e7), si_spad %.4g (6.43e6), ratio %.1f > 10",
               fom_sspd, fom_spad, ratio));
}

// --------------------------------------------------------------------------

struct HomRun {
    DipFit fit;
    DipFit corrected_fit;
    double accidental_rate_hz = 0.0;
    double analytic_accidental_hz = 0.0;  // r1 r2 w from measured singles
    double baseline_rate_hz = 0.0;
};

HomRun run_and_fit(const RunConfig& base, double acquisition_s, std::uint64_t seed, int threads) {
    HomScanConfig cfg = base.hom_config();
    cfg.acquisition_s = acquisition_s;
    cfg.seed = seed;
    cfg.threads = threads;
    const HomScanResult result = run_hom_scan(cfg);
    HomRun out;
    out.fit = fit_dip(result.curve);
    double acc_counts = 0.0;
    for (double a : result.accidental_counts) acc_counts += a;
    const double total_time = acquisition_s * static_cast<double>(result.curve.points.size());
    out.accidental_rate_hz = acc_counts / total_time;
    out.analytic_accidental_hz = accidental_rate_analytic(result.singles_rate_1_hz,
                                                          result.singles_rate_2_hz, cfg.window_ps);
    const double acc_mean = acc_counts / static_cast<double>(result.curve.points.size());
    DipCurve corrected = result.curve;
    for (auto& pt : corrected.points) pt.count = std::max(pt.count - acc_mean, 0.0);
    out.corrected_fit = fit_dip(corrected);
    out.baseline_rate_hz = out.fit.baseline_counts / acquisition_s;
    return out;
}

void criteria_4_to_6_hom() {
    const RunConfig sspd_base = paper_defaults(Experiment::hom, "sspd");
    const RunConfig spad_base = paper_defaults(Experiment::hom, "si_spad");

    // band checks at the nominal acquisitions
    const HomRun sspd = run_and_fit(sspd_base, 60.0, substream_seed(kMasterSeed, 1000), 2);
    const HomRun spad = run_and_fit(spad_base, 40.0, substream_seed(kMasterSeed, 2000), 2);

    // ordering study at desk scale: SSPD at the nominal 60 s/point, Si SPAD
    // simulated at 10 s/point (counts scale x4; the fitted V is unchanged by
    // count scaling, so the comparison uses the 10 s fits directly)
    const auto start = std::chrono::steady_clock::now();
    const int repeats = 100;
    std::atomic<int> next{0};
    std::vector<int> wins(repeats, 0);
    std::vector<std::thread> workers;
    for (int w = 0; w < 2; ++w)
        workers.emplace_back([&] {
            for (int r = next.fetch_add(1); r < repeats; r = next.fetch_add(1)) {
                const HomRun s =
                    run_and_fit(sspd_base, 60.0, substream_seed(kMasterSeed, 10 + r, 1), 1);
                const HomRun p =
                    run_and_fit(spad_base, 10.0, substream_seed(kMasterSeed, 10 + r, 2), 1);
                wins[r] = s.fit.visibility > p.fit.visibility ? 1 : 0;
            }
        });
    for (auto& t : workers) t.join();
    int win_count = 0;
    for (int w : wins) win_count += w;
    const double per_repeat = seconds_since(start) / repeats * 2.0;  // two workers

    const bool sspd_in_band = sspd.fit.visibility > 0.903 && sspd.fit.visibility < 0.943;
    const bool spad_in_band = spad.fit.visibility > 0.881 && spad.fit.visibility < 0.917;
    const bool corrected_in_band =
        spad.corrected_fit.visibility > 0.910 && spad.corrected_fit.visibility < 0.942;
    const bool ordering = win_count >= 95;
    const bool runtime_ok = per_repeat < 120.0;
    report(4, sspd_in_band && spad_in_band && corrected_in_band && ordering && runtime_ok,
           fmt("hom visibilities: sspd raw %.4f in [0.903,0.943], si_spad raw %.4f in "
               "[0.881,0.917], corrected %.4f in [0.910,0.942]; sspd > si_spad in %d/100 repeats "
               "(>=95); %.1f s/repeat at desk scale (sspd 60 s, si_spad 10 s x4)",
               sspd.fit.visibility, spad.fit.visibility, spad.corrected_fit.visibility, win_count,
               per_repeat));

    const double ratio = spad.baseline_rate_hz / sspd.baseline_rate_hz;
    report(5, ratio > 18.0 && ratio < 23.0,
           fmt("off-dip rate ratio si_spad : sspd = %.1f (%.1f / %.2f s^-1), band [18, 23]", ratio,
               spad.baseline_rate_hz, sspd.baseline_rate_hz));

    const bool sspd_acc_ok =
        sspd.analytic_accidental_hz > 0.005 && sspd.analytic_accidental_hz < 0.02;
    const bool spad_acc_ok = spad.accidental_rate_hz > 2.5 && spad.accidental_rate_hz < 10.0 &&
                             spad.analytic_accidental_hz > 2.5 &&
                             spad.analytic_accidental_hz < 10.0;
    report(6, sspd_acc_ok && spad_acc_ok,
           fmt("accidental floors: sspd %.4f Hz (r1 r2 w from measured singles, band "
               "[0.005,0.02]), si_spad %.2f Hz delayed-window / %.2f Hz analytic (band [2.5,10])",
               sspd.analytic_accidental_hz, spad.accidental_rate_hz, spad.analytic_accidental_hz));
}

// --------------------------------------------------------------------------

void criterion_7_cnot() {
    CnotConfig ideal;
    ideal.mode = RunMode::analytic;
    ideal.indistinguishability = 1.0;
    const CnotResult r = run_cnot_truth_table(ideal);
    const int expected_out[4] = {0, 1, 3, 2};
    double max_table_dev = 0.0, max_success_dev = 0.0;
    for (int in = 0; in < 4; ++in) {
        for (int out = 0; out < 4; ++out) {
            const double target = out == expected_out[in] ? 1.0 : 0.0;
            max_table_dev = std::max(max_table_dev, std::abs(r.table(in, out) - target));
        }
        max_success_dev = std::max(
            max_success_dev,
            std::abs(r.success_probabilities[static_cast<std::size_t>(in)] - 1.0 / 9.0));
    }
    const bool ideal_ok =
        max_table_dev < 1e-10 && max_success_dev < 1e-10 && std::abs(r.fidelity - 1.0) < 1e-10;

    CnotConfig calibrated = ideal;
    calibrated.indistinguishability = cnot_overlap_for_fidelity(0.904);
    const double f = run_cnot_truth_table(calibrated).fidelity;
    const bool calibrated_ok = f > 0.88 && f < 0.93;
    report(7, ideal_ok && calibrated_ok,
           fmt("cnot: ideal table within %.1e of the permutation, success 1/9 within %.1e, "
               "F(I=1) = %.12f; calibrated overlap %.4f gives F = %.4f in [0.88, 0.93]",
               max_table_dev, max_success_dev, r.fidelity, calibrated.indistinguishability, f));
}

void criterion_8_fringe() {
    RunConfig fringe = paper_defaults(Experiment::fringe);
    fringe.seed = substream_seed(kMasterSeed, 3000);
    fringe.threads = 2;
    const FringeCurve two = run_fringe_scan(fringe.fringe_config());
    const FringeFit contrast = fringe_contrast(two);
    const FringeFit period_two = fit_fringe_period(two);

    RunConfig single = fringe;
    single.fringe_mode = FringeMode::single_photon;
    single.source.background_hz = 0.0;  // calibration run on the bare source
    single.seed = substream_seed(kMasterSeed, 3001);
    const FringeCurve one = run_fringe_scan(single.fringe_config());
    const FringeFit period_one = fit_fringe_period(one);

    const double halving = 2.0 * period_two.period_rad / period_one.period_rad;
    const bool halving_ok = std::abs(halving - 1.0) < 0.02;
    const bool contrast_ok = contrast.contrast > 0.770 && contrast.contrast < 0.866;
    report(8, halving_ok && contrast_ok,
           fmt("fringe: two-photon period %.4f rad = single period %.4f rad / %.3f (within 2%%); "
               "mc contrast %.4f in [0.770, 0.866]",
               period_two.period_rad, period_one.period_rad, 2.0 / halving, contrast.contrast));
}

void criterion_9_hygiene() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "qwsim_acceptance";
    fs::remove_all(base);

    RunConfig cfg = paper_defaults(Experiment::hom, "sspd");
    cfg.delays_ps = {-3.0, -1.5, -0.8, -0.4, 0.0, 0.4, 0.8, 1.5, 3.0};
    cfg.acquisition_s = 2.0;
    cfg.seed = substream_seed(kMasterSeed, 4000);
    cfg.mode = RunMode::mc;
    cfg.output_dir = (base / "a").string();
    run_experiment(cfg);
    cfg.output_dir = (base / "b").string();
    run_experiment(cfg);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string csv_a = slurp(base / "a" / "results.csv");
    const bool identical = csv_a == slurp(base / "b" / "results.csv");

    // every data row: error equals sqrt(count) exactly after parsing back
    bool errors_exact = true;
    int rows = 0;
    std::istringstream csv(csv_a);
    std::string line;
    std::getline(csv, line);  // header
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        ++rows;
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        std::getline(row, field, ',');
        const double count = std::stod(field);
        std::getline(row, field, ',');
        const double error = std::stod(field);
        errors_exact &= error == std::sqrt(count);
    }
    fs::remove_all(base);
    report(9, identical && errors_exact && rows == 9,
           fmt("fixed seed reproduces results.csv byte-for-byte; %d/%d rows carry error = "
               "sqrt(count) exactly",
               rows, rows));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    criterion_1_permanent_oracle();
    criterion_2_hom_exactness();
    criterion_3_figures_of_merit();
    criteria_4_to_6_hom();
    criterion_7_cnot();
    criterion_8_fringe();
    criterion_9_hygiene();
    std::printf("%d/9 criteria passed (%.0f s total)\n", 9 - failures, seconds_since(start));
    return failures == 0 ? 0 : 1;
}
