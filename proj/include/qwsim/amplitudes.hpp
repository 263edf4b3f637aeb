#pragma once

#include <map>
#include <utility>

#include "qwsim/fock.hpp"
#include "qwsim/types.hpp"
#include "qwsim/unitary.hpp"

namespace qwsim {

/// Pairwise indistinguishability of the two source photons as a function of
/// their relative delay. coherence_time_ps is set by the spectral filters.
struct OverlapModel {
    double max_overlap = 1.0;      // indistinguishability at zero delay, in [0, 1]
    double coherence_time_ps = 1.0;
};

/// Gaussian overlap decay: max_overlap * exp(-(delay/coherence_time)^2).
double overlap(double delay_ps, const OverlapModel& model);

using Distribution = std::map<FockState, double>;

/// Transition amplitude <output| U |input> via the permanent of the
/// occupation-expanded submatrix, with the 1/sqrt(prod s! prod t!) factor.
Complex output_amplitude(const ModeUnitary& u, const FockState& input, const FockState& output);

/// Capacity guard for full output enumeration.
inline constexpr int kMaxPhotons = 4;
inline constexpr int kMaxModes = 8;

/// Probability of every n-photon output state. Sums to 1 for unitary U.
Distribution output_distribution(const ModeUnitary& u, const FockState& input);

/// Output distribution for fully distinguishable photons: each photon routes
/// independently through |U|^2.
Distribution distinguishable_distribution(const ModeUnitary& u, const FockState& input);

/// Convex mixture I * quantum + (1 - I) * distinguishable.
Distribution mixed_distribution(const ModeUnitary& u, const FockState& input, double indistinguishability);

/// Coincidence probability for one photon in each of two input modes,
/// detected one at each of the two output modes, at pair overlap I.
double two_photon_coincidence_prob(const ModeUnitary& u, const FockState& input,
                                   std::pair<int, int> out_modes, double indistinguishability);

}  // namespace qwsim
