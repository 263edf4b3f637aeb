#include "qwsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace qwsim {

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::clamp(threads, 1, n);
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

TimestampStream poisson_arrivals(double rate_hz, double duration_s, Rng& rng, std::string channel) {
    TimestampStream s;
    s.channel = std::move(channel);
    if (rate_hz <= 0.0) return s;
    const double duration_ps = duration_s * kPicosecondsPerSecond;
    const double mean_gap_ps = kPicosecondsPerSecond / rate_hz;
    s.times.reserve(static_cast<std::size_t>(rate_hz * duration_s * 1.05) + 16);
    double t = rng.exponential(mean_gap_ps);
    while (t < duration_ps) {
        s.times.push_back(static_cast<TimePs>(std::llround(t)));
        t += rng.exponential(mean_gap_ps);
    }
    return s;
}

struct McPointResult {
    std::uint64_t coincidences = 0;
    std::uint64_t accidentals = 0;
    std::uint64_t clicks_1 = 0;
    std::uint64_t clicks_2 = 0;
};

/// One acquisition of the full pipeline: source, routing, background,
/// detectors, coincidence counting, delayed-window accidental estimate.
McPointResult mc_coincidence_point(const SourceModel& src, const RoutingModel& routing,
                                   const DetectorModel& d1, const DetectorModel& d2,
                                   double duration_s, double window_ps, TimePs accidental_offset_ps,
                                   Rng& rng) {
    const auto [a, b] = generate_pair_arrivals(src, duration_s, rng);
    auto [to1, to2] = route_pairs(a, b, routing, rng);
    if (src.background_hz > 0.0) {
        const auto bg1 = poisson_arrivals(src.background_hz, duration_s, rng, "bg1");
        const auto bg2 = poisson_arrivals(src.background_hz, duration_s, rng, "bg2");
        to1 = merge_streams(to1, bg1, to1.channel);
        to2 = merge_streams(to2, bg2, to2.channel);
    }
    const auto clicks1 = apply_detector(to1, d1, duration_s, rng);
    const auto clicks2 = apply_detector(to2, d2, duration_s, rng);
    McPointResult r;
    r.coincidences = count_coincidences(clicks1, clicks2, window_ps, 0, duration_s).count;
    r.accidentals =
        delayed_window_accidentals(clicks1, clicks2, window_ps, accidental_offset_ps, duration_s).count;
    r.clicks_1 = clicks1.size();
    r.clicks_2 = clicks2.size();
    return r;
}

void validate_detector_pair(const DetectorModel& d1, const DetectorModel& d2) {
    d1.validate();
    d2.validate();
}

}  // namespace

double coincidence_capture_fraction(double window_ps, const DetectorModel& d1, const DetectorModel& d2) {
    const double s1 = d1.jitter_sigma_ps();
    const double s2 = d2.jitter_sigma_ps();
    const double sd = std::sqrt(s1 * s1 + s2 * s2);
    if (sd <= 0.0) return 1.0;
    return std::erf((window_ps / 2.0) / (sd * std::sqrt(2.0)));
}

ExpectedRates expected_rates(const SourceModel& src, const RoutingModel& routing,
                             const DetectorModel& d1, const DetectorModel& d2, double window_ps) {
    src.validate();
    routing.validate();
    const double R = src.pair_rate_hz;
    const double c = src.coupling;
    const double flux1 = R * (c * c * (routing.pair_split + 2.0 * routing.pair_both_1) +
                              c * (1.0 - c) * (routing.single_a_to_1 + routing.single_b_to_1)) +
                         src.background_hz;
    const double flux2 = R * (c * c * (routing.pair_split + 2.0 * routing.pair_both_2) +
                              c * (1.0 - c) * (2.0 - routing.single_a_to_1 - routing.single_b_to_1)) +
                         src.background_hz;
    ExpectedRates rates;
    rates.singles_1_hz = flux1 * d1.efficiency + d1.dark_rate_hz;
    rates.singles_2_hz = flux2 * d2.efficiency + d2.dark_rate_hz;
    rates.true_coincidence_hz = R * c * c * routing.pair_split * d1.efficiency * d2.efficiency *
                                coincidence_capture_fraction(window_ps, d1, d2);
    rates.accidental_hz = accidental_rate_analytic(rates.singles_1_hz, rates.singles_2_hz, window_ps);
    return rates;
}

// ---------------------------------------------------------------------------
// HOM scan
// ---------------------------------------------------------------------------

void HomScanConfig::validate() const {
    if (delays_ps.size() < 5) throw ConfigError("hom scan: need at least 5 delay points");
    for (std::size_t i = 1; i < delays_ps.size(); ++i)
        if (!(delays_ps[i] > delays_ps[i - 1]))
            throw ConfigError("hom scan: delays must be strictly increasing");
    if (!(acquisition_s > 0.0)) throw ConfigError("hom scan: acquisition must be > 0");
    if (!(window_ps > 0.0)) throw ConfigError("hom scan: window must be > 0");
    if (!(static_cast<double>(accidental_offset_ps) > 10.0 * window_ps))
        throw ConfigError("hom scan: accidental offset must exceed 10x window");
    if (threads < 1) throw ConfigError("hom scan: threads must be >= 1");
    if (circuit.mode_count != 2) throw ConfigError("hom scan: circuit must have exactly 2 modes");
    source.validate();
    validate_detector_pair(detector1, detector2);
}

HomScanResult run_hom_scan(const HomScanConfig& cfg) {
    cfg.validate();
    const ModeUnitary u = to_unitary(cfg.circuit);
    const int n = static_cast<int>(cfg.delays_ps.size());

    HomScanResult result;
    result.curve.acquisition_s = cfg.acquisition_s;
    result.curve.detector_label = cfg.detector1.label + "+" + cfg.detector2.label;
    result.curve.points.resize(n);
    result.accidental_counts.resize(n);

    std::vector<std::uint64_t> clicks1(n, 0), clicks2(n, 0);
    parallel_for(n, cfg.threads, [&](int i) {
        const double delay = cfg.delays_ps[i];
        const double indist = overlap(delay, cfg.source.intrinsic_overlap);
        const RoutingModel routing = routing_from_unitary(u, {0, 1}, {0, 1}, indist);
        DipPoint& pt = result.curve.points[i];
        pt.delay_ps = delay;
        if (cfg.mode == RunMode::analytic) {
            const ExpectedRates rates =
                expected_rates(cfg.source, routing, cfg.detector1, cfg.detector2, cfg.window_ps);
            pt.count = rates.total_coincidence_hz() * cfg.acquisition_s;
            pt.error = std::sqrt(pt.count);
            result.accidental_counts[i] = rates.accidental_hz * cfg.acquisition_s;
            clicks1[i] = static_cast<std::uint64_t>(rates.singles_1_hz * cfg.acquisition_s);
            clicks2[i] = static_cast<std::uint64_t>(rates.singles_2_hz * cfg.acquisition_s);
        } else {
            Rng rng(substream_seed(cfg.seed, static_cast<std::uint64_t>(i)));
            const McPointResult mc =
                mc_coincidence_point(cfg.source, routing, cfg.detector1, cfg.detector2,
                                     cfg.acquisition_s, cfg.window_ps, cfg.accidental_offset_ps, rng);
            pt.count = static_cast<double>(mc.coincidences);
            pt.error = std::sqrt(pt.count);
            result.accidental_counts[i] = static_cast<double>(mc.accidentals);
            clicks1[i] = mc.clicks_1;
            clicks2[i] = mc.clicks_2;
        }
    });

    const double total_time = cfg.acquisition_s * n;
    result.singles_rate_1_hz =
        static_cast<double>(std::accumulate(clicks1.begin(), clicks1.end(), std::uint64_t{0})) / total_time;
    result.singles_rate_2_hz =
        static_cast<double>(std::accumulate(clicks2.begin(), clicks2.end(), std::uint64_t{0})) / total_time;
    return result;
}

DipFit fit_dip(const DipCurve& curve) {
    const std::size_t n = curve.points.size();
    if (n < 5) throw std::domain_error("fit_dip: need at least 5 points");
    std::vector<double> x(n), y(n), sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = curve.points[i].delay_ps;
        y[i] = curve.points[i].count;
        sigma[i] = std::max(curve.points[i].error, 1.0);
    }
    const double y_max = *std::max_element(y.begin(), y.end());
    if (!(y_max > 0.0)) throw std::domain_error("fit_dip: baseline not identifiable (all counts zero)");

    // initial guesses: baseline from the upper half, dip floor from the minimum
    std::vector<double> sorted_y = y;
    std::sort(sorted_y.begin(), sorted_y.end());
    const std::size_t upper_start = (3 * n) / 5;
    double b0 = 0.0;
    for (std::size_t i = upper_start; i < n; ++i) b0 += sorted_y[i];
    b0 /= static_cast<double>(n - upper_start);
    const auto min_it = std::min_element(y.begin(), y.end());
    const double t0 = x[static_cast<std::size_t>(min_it - y.begin())];
    const double v0 = std::clamp(1.0 - *min_it / b0, 0.05, 0.999);

    double w0 = 0.0;
    const double half_depth = b0 - 0.5 * v0 * b0;
    for (std::size_t i = 0; i < n; ++i)
        if (y[i] < half_depth) w0 = std::max(w0, std::abs(x[i] - t0));
    if (w0 <= 0.0) w0 = (x.back() - x.front()) / 6.0;

    Vector initial(4);
    initial << b0, v0, t0, w0;
    const FitResult raw = fit_curve(dip_model, x, y, sigma, initial);

    DipFit fit;
    fit.raw = raw;
    fit.baseline_counts = raw.params(0);
    fit.visibility = raw.params(1);
    fit.visibility_sigma = raw.standard_errors(1);
    fit.center_ps = raw.params(2);
    fit.width_ps = std::abs(raw.params(3));
    return fit;
}

// ---------------------------------------------------------------------------
// CNOT truth table
// ---------------------------------------------------------------------------

void CnotConfig::validate() const {
    if (!(indistinguishability >= 0.0 && indistinguishability <= 1.0))
        throw ConfigError("cnot: indistinguishability must be in [0, 1]");
    detector.validate();
}

namespace {

constexpr std::array<int, 4> kIdealCnotOutput = {0, 1, 3, 2};

FockState cnot_input(const LogicalEncoding& enc, int input, int modes) {
    const int c = (input >> 1) & 1;
    const int t = input & 1;
    return FockState::with_photons_at(
        modes, {c == 0 ? enc.control_rails.first : enc.control_rails.second,
                t == 0 ? enc.target_rails.first : enc.target_rails.second});
}

struct OutcomeSampler {
    std::vector<double> quantum_cdf;
    std::vector<double> classical_cdf;
    // postselection class per outcome: -1 fails, else logical output index
    std::vector<int> logical;

    int sample(double indist, Rng& rng) const {
        const auto& cdf = rng.bernoulli(indist) ? quantum_cdf : classical_cdf;
        const double x = rng.uniform();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
        const auto idx = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
        return logical[idx];
    }
};

OutcomeSampler make_outcome_sampler(const ModeUnitary& u, const FockState& input,
                                    const LogicalEncoding& enc) {
    const Distribution quantum = output_distribution(u, input);
    const Distribution classical = distinguishable_distribution(u, input);
    OutcomeSampler s;
    double cq = 0.0, cc = 0.0;
    for (const auto& [state, pq] : quantum) {
        const auto it = classical.find(state);
        cq += pq;
        cc += it == classical.end() ? 0.0 : it->second;
        s.quantum_cdf.push_back(cq);
        s.classical_cdf.push_back(cc);
        Distribution single{{state, 1.0}};
        const LogicalDistribution post = postselect_logical_distribution(single, enc);
        if (post.degenerate) {
            s.logical.push_back(-1);
        } else {
            const auto* row = post.probabilities.data();
            s.logical.push_back(static_cast<int>(std::max_element(row, row + 4) - row));
        }
    }
    return s;
}

}  // namespace

CnotResult run_cnot_truth_table(const CnotConfig& cfg) {
    cfg.validate();
    const auto [spec, enc] = build_cnot();
    const ModeUnitary u = to_unitary(spec);
    CnotResult result;

    if (cfg.mode == RunMode::analytic) {
        for (int input = 0; input < 4; ++input) {
            const FockState in = cnot_input(enc, input, spec.mode_count);
            const Distribution dist = mixed_distribution(u, in, cfg.indistinguishability);
            const LogicalDistribution post = postselect_logical_distribution(dist, enc);
            result.degenerate |= post.degenerate;
            result.success_probabilities[static_cast<std::size_t>(input)] = post.success_probability;
            for (int out = 0; out < 4; ++out)
                result.table(input, out) = post.probabilities[static_cast<std::size_t>(out)];
        }
        result.fidelity = logical_fidelity(result.table);
        return result;
    }

    // MC: per input, draw routed outcomes until enough post-selected events
    // were "detected" (both photons convert, probability eta^2).
    const std::uint64_t target =
        cfg.shots_per_input > 0 ? cfg.shots_per_input : 1000;  // 1000 => sigma_F < 0.008
    const double p_detect = cfg.detector.efficiency * cfg.detector.efficiency;
    double fidelity_var = 0.0;
    for (int input = 0; input < 4; ++input) {
        Rng rng(substream_seed(cfg.seed, static_cast<std::uint64_t>(input), 0xc0));
        const FockState in = cnot_input(enc, input, spec.mode_count);
        const OutcomeSampler sampler = make_outcome_sampler(u, in, enc);
        std::array<std::uint64_t, 4> tally{};
        std::uint64_t detected = 0, postselected = 0, attempts = 0;
        const std::uint64_t attempt_cap = 200'000'000;
        while (detected < target && attempts < attempt_cap) {
            ++attempts;
            const int logical = sampler.sample(cfg.indistinguishability, rng);
            if (logical < 0) continue;
            ++postselected;
            if (!rng.bernoulli(p_detect)) continue;
            ++detected;
            ++tally[static_cast<std::size_t>(logical)];
        }
        result.shots_used[static_cast<std::size_t>(input)] = attempts;
        if (detected == 0) {
            result.degenerate = true;
            continue;
        }
        result.success_probabilities[static_cast<std::size_t>(input)] =
            static_cast<double>(postselected) / static_cast<double>(attempts);
        for (int out = 0; out < 4; ++out) {
            const double p = static_cast<double>(tally[static_cast<std::size_t>(out)]) /
                             static_cast<double>(detected);
            result.table(input, out) = p;
            result.cell_errors(input, out) =
                std::sqrt(std::max(p * (1.0 - p), 1.0 / static_cast<double>(detected)) /
                          static_cast<double>(detected));
        }
        const double p_ideal = result.table(input, kIdealCnotOutput[static_cast<std::size_t>(input)]);
        fidelity_var += p_ideal * (1.0 - p_ideal) / static_cast<double>(detected) / 16.0;
    }
    if (!result.degenerate) {
        result.fidelity = logical_fidelity(result.table);
        result.fidelity_sigma = std::sqrt(fidelity_var);
    }
    return result;
}

double logical_fidelity(const TruthTable& table) {
    for (int r = 0; r < 4; ++r) {
        const double row_sum = table.row(r).sum();
        if (std::abs(row_sum - 1.0) > 1e-6)
            throw std::domain_error("logical_fidelity: row " + std::to_string(r) +
                                    " does not sum to 1");
        for (int c = 0; c < 4; ++c)
            if (table(r, c) < -1e-12) throw std::domain_error("logical_fidelity: negative probability");
    }
    double f = 0.0;
    for (int r = 0; r < 4; ++r) f += table(r, kIdealCnotOutput[static_cast<std::size_t>(r)]);
    return f / 4.0;
}

// ---------------------------------------------------------------------------
// Mach-Zehnder fringe scan
// ---------------------------------------------------------------------------

void FringeScanConfig::validate() const {
    const auto phases = scan_phases();
    if (phases.size() < 8) throw ConfigError("fringe scan: need at least 8 points");
    for (std::size_t i = 1; i < phases.size(); ++i)
        if (!(phases[i] > phases[i - 1]))
            throw ConfigError("fringe scan: scan grid must be strictly increasing");
    const double k = fringe_mode == FringeMode::two_photon ? 2.0 : 1.0;
    const double period = 2.0 * M_PI / k;
    const double spacing = (phases.back() - phases.front()) / static_cast<double>(phases.size() - 1);
    if (spacing > period / 8.0)
        throw ConfigError("fringe scan: need at least 8 points per fringe period");
    if (!(acquisition_s > 0.0)) throw ConfigError("fringe scan: acquisition must be > 0");
    if (!(window_ps > 0.0)) throw ConfigError("fringe scan: window must be > 0");
    if (threads < 1) throw ConfigError("fringe scan: threads must be >= 1");
    source.validate();
    validate_detector_pair(detector1, detector2);
}

std::vector<double> FringeScanConfig::scan_phases() const {
    if (voltages_v.empty()) return phases_rad;
    std::vector<double> phases;
    phases.reserve(voltages_v.size());
    for (double v : voltages_v) phases.push_back(phase_from_voltage(v, alpha_rad_per_v2));
    return phases;
}

FringeCurve run_fringe_scan(const FringeScanConfig& cfg) {
    cfg.validate();
    const auto phases = cfg.scan_phases();
    const int n = static_cast<int>(phases.size());

    FringeCurve curve;
    curve.mode = cfg.fringe_mode;
    curve.acquisition_s = cfg.acquisition_s;
    curve.voltage_scan = !cfg.voltages_v.empty();
    curve.points.resize(n);

    const double indist = cfg.source.intrinsic_overlap.max_overlap;
    parallel_for(n, cfg.threads, [&](int i) {
        FringePoint& pt = curve.points[i];
        pt.phase_rad = phases[i];
        if (curve.voltage_scan) pt.voltage_v = cfg.voltages_v[static_cast<std::size_t>(i)];
        const ModeUnitary u = to_unitary(build_mzi(phases[i]));

        if (cfg.fringe_mode == FringeMode::two_photon) {
            const RoutingModel routing = routing_from_unitary(u, {0, 1}, {0, 1}, indist);
            if (cfg.mode == RunMode::analytic) {
                const ExpectedRates rates =
                    expected_rates(cfg.source, routing, cfg.detector1, cfg.detector2, cfg.window_ps);
                pt.count = rates.total_coincidence_hz() * cfg.acquisition_s;
            } else {
                Rng rng(substream_seed(cfg.seed, static_cast<std::uint64_t>(i), 0xf2));
                const McPointResult mc = mc_coincidence_point(
                    cfg.source, routing, cfg.detector1, cfg.detector2, cfg.acquisition_s,
                    cfg.window_ps, static_cast<TimePs>(std::llround(100.0 * cfg.window_ps)), rng);
                pt.count = static_cast<double>(mc.coincidences);
            }
        } else {
            // single photon into mode 0, counting the mode-0 detector
            const double p_to_1 = std::norm(u(0, 0));
            const double photon_rate = cfg.source.pair_rate_hz * cfg.source.coupling;
            if (cfg.mode == RunMode::analytic) {
                const double rate = (photon_rate * p_to_1 + cfg.source.background_hz) *
                                        cfg.detector1.efficiency +
                                    cfg.detector1.dark_rate_hz;
                pt.count = rate * cfg.acquisition_s;
            } else {
                Rng rng(substream_seed(cfg.seed, static_cast<std::uint64_t>(i), 0xf1));
                TimestampStream routed{{}, "det1"};
                const auto photons =
                    poisson_arrivals(photon_rate, cfg.acquisition_s, rng, "src");
                routed.times.reserve(photons.size());
                for (TimePs t : photons.times)
                    if (rng.bernoulli(p_to_1)) routed.times.push_back(t);
                if (cfg.source.background_hz > 0.0) {
                    const auto bg =
                        poisson_arrivals(cfg.source.background_hz, cfg.acquisition_s, rng, "bg");
                    routed = merge_streams(routed, bg, "det1");
                }
                pt.count = static_cast<double>(
                    apply_detector(routed, cfg.detector1, cfg.acquisition_s, rng).size());
            }
        }
        pt.error = std::sqrt(pt.count);
    });
    return curve;
}

namespace {

FringeFit fit_fringe(const FringeCurve& curve, bool free_frequency) {
    const std::size_t n = curve.points.size();
    if (n < 8) throw std::domain_error("fringe fit: need at least 8 points");
    std::vector<double> x(n), y(n), sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = curve.points[i].phase_rad;
        y[i] = curve.points[i].count;
        sigma[i] = std::max(curve.points[i].error, 1.0);
    }
    const double span = x.back() - x.front();
    const double k = curve.mode == FringeMode::two_photon ? 2.0 : 1.0;
    if (span * k < 2.0 * M_PI - 1e-9)
        throw std::domain_error("fringe fit: scan must span at least one period");

    const double b0 = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    const double y_max = *std::max_element(y.begin(), y.end());
    const double y_min = *std::min_element(y.begin(), y.end());
    const double c0 =
        y_max + y_min > 0.0 ? std::clamp((y_max - y_min) / (y_max + y_min), 0.01, 0.999) : 0.01;
    double proj_cos = 0.0, proj_sin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        proj_cos += (y[i] - b0) * std::cos(k * x[i]);
        proj_sin += (y[i] - b0) * std::sin(k * x[i]);
    }
    const double phi0 = std::atan2(-proj_sin, proj_cos);

    FitResult raw;
    if (free_frequency) {
        Vector initial(4);
        initial << b0, c0, k, phi0;
        raw = fit_curve(fringe_model_free, x, y, sigma, initial);
    } else {
        Vector initial(3);
        initial << b0, c0, phi0;
        raw = fit_curve(fringe_model(k), x, y, sigma, initial);
    }

    FringeFit fit;
    fit.raw = raw;
    fit.contrast = std::abs(raw.params(1));
    fit.contrast_sigma = raw.standard_errors(1);
    const double k_fit = free_frequency ? std::abs(raw.params(2)) : k;
    fit.period_rad = 2.0 * M_PI / k_fit;
    fit.period_sigma = free_frequency ? 2.0 * M_PI / (k_fit * k_fit) * raw.standard_errors(2) : 0.0;
    return fit;
}

}  // namespace

FringeFit fringe_contrast(const FringeCurve& curve) { return fit_fringe(curve, false); }

FringeFit fit_fringe_period(const FringeCurve& curve) { return fit_fringe(curve, true); }

}  // namespace qwsim
