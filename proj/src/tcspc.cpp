#include "qwsim/tcspc.hpp"

#include <cmath>
#include <cstdlib>

namespace qwsim {

void SourceModel::validate() const {
    if (!(pair_rate_hz >= 0.0)) throw std::domain_error("SourceModel: pair rate must be >= 0");
    if (!(coupling >= 0.0 && coupling <= 1.0))
        throw std::domain_error("SourceModel: coupling must be in [0, 1]");
    if (!(background_hz >= 0.0)) throw std::domain_error("SourceModel: background must be >= 0");
}

CoincidenceResult CoincidenceResult::make(std::uint64_t count, double duration_s, double window_ps) {
    CoincidenceResult r;
    r.count = count;
    r.duration_s = duration_s;
    r.window_ps = window_ps;
    r.rate_hz = duration_s > 0.0 ? static_cast<double>(count) / duration_s : 0.0;
    r.error = std::sqrt(static_cast<double>(count));
    return r;
}

std::pair<TimestampStream, TimestampStream> generate_pair_arrivals(const SourceModel& src,
                                                                   double duration_s, Rng& rng) {
    src.validate();
    if (!(duration_s > 0.0)) throw std::domain_error("generate_pair_arrivals: duration must be > 0");
    TimestampStream a{{}, "A"}, b{{}, "B"};
    if (src.pair_rate_hz <= 0.0) return {a, b};
    const double duration_ps = duration_s * kPicosecondsPerSecond;
    const double mean_gap_ps = kPicosecondsPerSecond / src.pair_rate_hz;
    const auto expected = static_cast<std::size_t>(src.pair_rate_hz * duration_s * src.coupling * 1.05);
    a.times.reserve(expected);
    b.times.reserve(expected);
    double t = rng.exponential(mean_gap_ps);
    while (t < duration_ps) {
        const auto stamp = static_cast<TimePs>(std::llround(t));
        if (rng.bernoulli(src.coupling)) a.times.push_back(stamp);
        if (rng.bernoulli(src.coupling)) b.times.push_back(stamp);
        t += rng.exponential(mean_gap_ps);
    }
    return {a, b};
}

void RoutingModel::validate() const {
    const double sum = pair_split + pair_both_1 + pair_both_2;
    if (!(pair_split >= 0.0 && pair_both_1 >= 0.0 && pair_both_2 >= 0.0) ||
        std::abs(sum - 1.0) > 1e-9)
        throw std::domain_error("RoutingModel: pair outcome probabilities must sum to 1");
    if (!(single_a_to_1 >= 0.0 && single_a_to_1 <= 1.0 && single_b_to_1 >= 0.0 && single_b_to_1 <= 1.0))
        throw std::domain_error("RoutingModel: single-photon probabilities must be in [0, 1]");
}

RoutingModel routing_from_unitary(const ModeUnitary& u, std::pair<int, int> in_modes,
                                  std::pair<int, int> out_modes, double indistinguishability) {
    const auto [ia, ib] = in_modes;
    const auto [o1, o2] = out_modes;
    const FockState input = FockState::with_photons_at(u.modes(), {ia, ib});
    const Distribution dist = mixed_distribution(u, input, indistinguishability);

    auto prob_of = [&](std::initializer_list<int> photons) {
        const auto it = dist.find(FockState::with_photons_at(u.modes(), photons));
        return it == dist.end() ? 0.0 : it->second;
    };
    RoutingModel r;
    r.pair_split = prob_of({o1, o2});
    r.pair_both_1 = prob_of({o1, o1});
    r.pair_both_2 = prob_of({o2, o2});
    // renormalize over the detected-output subspace (exact when the two
    // detectors cover all output modes, as in every 2-mode circuit here)
    const double total = r.pair_split + r.pair_both_1 + r.pair_both_2;
    if (total <= 0.0) throw std::domain_error("routing_from_unitary: no probability reaches the detectors");
    r.pair_split /= total;
    r.pair_both_1 /= total;
    r.pair_both_2 /= total;
    const double pa1 = std::norm(u(o1, ia));
    const double pa2 = std::norm(u(o2, ia));
    const double pb1 = std::norm(u(o1, ib));
    const double pb2 = std::norm(u(o2, ib));
    r.single_a_to_1 = pa1 / (pa1 + pa2);
    r.single_b_to_1 = pb1 / (pb1 + pb2);
    r.validate();
    return r;
}

std::pair<TimestampStream, TimestampStream> route_pairs(const TimestampStream& a,
                                                        const TimestampStream& b,
                                                        const RoutingModel& routing, Rng& rng) {
    routing.validate();
    require_sorted(a, "route_pairs");
    require_sorted(b, "route_pairs");
    TimestampStream to1{{}, "det1"}, to2{{}, "det2"};
    to1.times.reserve(a.size());
    to2.times.reserve(b.size());
    std::size_t i = 0, j = 0;
    auto route_single = [&](TimePs t, double p_to_1) {
        (rng.bernoulli(p_to_1) ? to1 : to2).times.push_back(t);
    };
    while (i < a.size() || j < b.size()) {
        if (j >= b.size() || (i < a.size() && a.times[i] < b.times[j])) {
            route_single(a.times[i++], routing.single_a_to_1);
        } else if (i >= a.size() || b.times[j] < a.times[i]) {
            route_single(b.times[j++], routing.single_b_to_1);
        } else {
            const TimePs t = a.times[i];
            const double x = rng.uniform();
            if (x < routing.pair_split) {
                to1.times.push_back(t);
                to2.times.push_back(t);
            } else if (x < routing.pair_split + routing.pair_both_1) {
                to1.times.push_back(t);
                to1.times.push_back(t);
            } else {
                to2.times.push_back(t);
                to2.times.push_back(t);
            }
            ++i;
            ++j;
        }
    }
    return {to1, to2};
}

CoincidenceResult count_coincidences(const TimestampStream& a, const TimestampStream& b,
                                     double window_ps, TimePs offset_ps, double duration_s) {
    require_sorted(a, "count_coincidences");
    require_sorted(b, "count_coincidences");
    // integer comparison: |ta - (tb + offset)| * 2 <= window
    const auto window_int = static_cast<TimePs>(std::llround(window_ps));
    std::uint64_t n = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const TimePs delta = a.times[i] - (b.times[j] + offset_ps);
        if (std::llabs(delta) * 2 <= window_int) {
            ++n;
            ++i;
            ++j;
        } else if (delta < 0) {
            ++i;
        } else {
            ++j;
        }
    }
    return CoincidenceResult::make(n, duration_s, window_ps);
}

double accidental_rate_analytic(double r1_hz, double r2_hz, double window_ps) {
    if (!(r1_hz >= 0.0 && r2_hz >= 0.0)) throw std::domain_error("accidental_rate_analytic: rates must be >= 0");
    return r1_hz * r2_hz * window_ps * 1e-12;
}

CoincidenceResult delayed_window_accidentals(const TimestampStream& a, const TimestampStream& b,
                                             double window_ps, TimePs large_offset_ps,
                                             double duration_s) {
    if (!(static_cast<double>(std::llabs(large_offset_ps)) > 10.0 * window_ps))
        throw std::domain_error("delayed_window_accidentals: offset must exceed 10x window");
    return count_coincidences(a, b, window_ps, large_offset_ps, duration_s);
}

Visibility visibility(double n_max, double n_min) {
    if (!(n_max > 0.0)) throw std::domain_error("visibility: n_max must be > 0");
    if (n_min < 0.0) throw std::domain_error("visibility: n_min must be >= 0");
    Visibility v;
    v.value = (n_max - n_min) / n_max;
    v.sigma = n_min > 0.0 ? (n_min / n_max) * std::sqrt(1.0 / n_min + 1.0 / n_max) : 0.0;
    return v;
}

Visibility corrected_visibility(double n_max, double n_min, double n_acc) {
    if (!(n_acc >= 0.0)) throw std::domain_error("corrected_visibility: n_acc must be >= 0");
    if (!(n_max > n_acc)) throw std::domain_error("corrected_visibility: n_max must exceed n_acc");
    const double max_sub = n_max - n_acc;
    const double min_sub = std::max(n_min - n_acc, 0.0);
    return visibility(max_sub, min_sub);
}

}  // namespace qwsim
