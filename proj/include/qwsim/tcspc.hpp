#pragma once

#include <utility>

#include "qwsim/amplitudes.hpp"
#include "qwsim/rng.hpp"
#include "qwsim/timestamps.hpp"
#include "qwsim/types.hpp"

namespace qwsim {

/// Photon-pair source feeding the chip: continuous-wave downconversion pairs
/// plus an uncorrelated background flux per output channel. `coupling` is the
/// probability that a photon survives the pass through the chip.
struct SourceModel {
    double pair_rate_hz = 0.0;
    double coupling = 0.7;
    OverlapModel intrinsic_overlap;
    double background_hz = 0.0;  // uncorrelated photons per detector channel

    void validate() const;
};

/// Counted coincidences over an acquisition, with the Poisson error sqrt(N).
struct CoincidenceResult {
    std::uint64_t count = 0;
    double duration_s = 0.0;
    double window_ps = 0.0;
    double rate_hz = 0.0;   // count / duration
    double error = 0.0;     // sqrt(count)

    static CoincidenceResult make(std::uint64_t count, double duration_s, double window_ps);
};

/// Pair creation times drawn as a homogeneous Poisson process; each photon of
/// a pair independently survives chip coupling. Surviving photons land in
/// streams A/B with the shared creation timestamp.
std::pair<TimestampStream, TimestampStream> generate_pair_arrivals(const SourceModel& src,
                                                                   double duration_s, Rng& rng);

/// Per-pair outcome probabilities of a two-input circuit, plus single-photon
/// routing for photons whose partner was lost upstream.
struct RoutingModel {
    double pair_split = 0.0;    // one photon to each detector
    double pair_both_1 = 0.0;   // both photons bunch onto detector 1
    double pair_both_2 = 0.0;
    double single_a_to_1 = 0.5;
    double single_b_to_1 = 0.5;

    void validate() const;
};

/// Routing probabilities of the circuit unitary for input photons in
/// `in_modes`, detectors on `out_modes`, at pair overlap I.
RoutingModel routing_from_unitary(const ModeUnitary& u, std::pair<int, int> in_modes,
                                  std::pair<int, int> out_modes, double indistinguishability);

/// Collapse the circuit to per-pair outcome sampling. Pairs are identified by
/// equal timestamps in the two input streams; unpaired photons route through
/// the single-photon probabilities.
std::pair<TimestampStream, TimestampStream> route_pairs(const TimestampStream& a,
                                                        const TimestampStream& b,
                                                        const RoutingModel& routing, Rng& rng);

/// Greedy one-to-one matching of clicks with |t_a - (t_b + offset)| <=
/// window/2, linear two-pointer sweep. duration_s only feeds the rate.
CoincidenceResult count_coincidences(const TimestampStream& a, const TimestampStream& b,
                                     double window_ps, TimePs offset_ps, double duration_s);

/// r1 * r2 * window: the flat two-detector accidental-coincidence rate.
double accidental_rate_analytic(double r1_hz, double r2_hz, double window_ps);

/// Empirical accidental estimate: coincidences at an offset far outside any
/// physical correlation. Requires offset > 10 * window.
CoincidenceResult delayed_window_accidentals(const TimestampStream& a, const TimestampStream& b,
                                             double window_ps, TimePs large_offset_ps,
                                             double duration_s);

struct Visibility {
    double value = 0.0;
    double sigma = 0.0;
};

/// V = (n_max - n_min) / n_max with Poisson error propagation. n_min = 0
/// returns sigma 0, the limiting value of the propagation formula.
Visibility visibility(double n_max, double n_min);

/// Visibility after accidental subtraction; n_min - n_acc floors at zero.
Visibility corrected_visibility(double n_max, double n_min, double n_acc);

}  // namespace qwsim
