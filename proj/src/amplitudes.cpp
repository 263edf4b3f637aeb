#include "qwsim/amplitudes.hpp"

#include <cmath>

#include "qwsim/permanent.hpp"

namespace qwsim {

double overlap(double delay_ps, const OverlapModel& model) {
    if (!(model.coherence_time_ps > 0.0))
        throw std::domain_error("overlap: coherence time must be positive");
    if (!(model.max_overlap >= 0.0 && model.max_overlap <= 1.0))
        throw std::domain_error("overlap: max_overlap must be in [0, 1]");
    const double x = delay_ps / model.coherence_time_ps;
    return model.max_overlap * std::exp(-x * x);
}

namespace {

std::vector<int> expand_occupations(const FockState& s) {
    std::vector<int> modes;
    modes.reserve(s.photons());
    for (int m = 0; m < s.modes(); ++m)
        for (int k = 0; k < s[m]; ++k) modes.push_back(m);
    return modes;
}

double occupation_factorial(const FockState& s) {
    double f = 1.0;
    for (int m = 0; m < s.modes(); ++m) f *= factorial(s[m]);
    return f;
}

}  // namespace

Complex output_amplitude(const ModeUnitary& u, const FockState& input, const FockState& output) {
    if (input.modes() != u.modes() || output.modes() != u.modes())
        throw std::domain_error("output_amplitude: mode count mismatch");
    if (input.photons() != output.photons())
        throw std::domain_error("output_amplitude: photon number mismatch");
    const auto cols = expand_occupations(input);
    const auto rows = expand_occupations(output);
    const int n = static_cast<int>(cols.size());
    if (n == 0) return Complex(1.0, 0.0);
    Matrix sub(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) sub(r, c) = u(rows[r], cols[c]);
    return permanent(sub) / std::sqrt(occupation_factorial(input) * occupation_factorial(output));
}

Distribution output_distribution(const ModeUnitary& u, const FockState& input) {
    if (input.modes() != u.modes())
        throw std::domain_error("output_distribution: mode count mismatch");
    if (input.photons() > kMaxPhotons || u.modes() > kMaxModes)
        throw CapacityError("output_distribution: supports at most 4 photons over 8 modes");
    Distribution dist;
    for (const auto& out : enumerate_fock_states(u.modes(), input.photons())) {
        const Complex amp = output_amplitude(u, input, out);
        dist.emplace(out, std::norm(amp));
    }
    return dist;
}

Distribution distinguishable_distribution(const ModeUnitary& u, const FockState& input) {
    if (input.modes() != u.modes())
        throw std::domain_error("distinguishable_distribution: mode count mismatch");
    if (input.photons() > kMaxPhotons || u.modes() > kMaxModes)
        throw CapacityError("distinguishable_distribution: supports at most 4 photons over 8 modes");
    const int m = u.modes();
    const auto photons = expand_occupations(input);
    const int n = static_cast<int>(photons.size());
    RealMatrix p = u.matrix().cwiseAbs2();

    Distribution dist;
    std::vector<int> assign(n, 0);
    // iterate over all m^n independent routings
    for (;;) {
        double prob = 1.0;
        std::vector<int> occ(m, 0);
        for (int k = 0; k < n; ++k) {
            prob *= p(assign[k], photons[k]);
            ++occ[assign[k]];
        }
        dist[FockState(occ)] += prob;
        int k = 0;
        while (k < n && ++assign[k] == m) assign[k++] = 0;
        if (k == n) break;
    }
    return dist;
}

Distribution mixed_distribution(const ModeUnitary& u, const FockState& input, double indistinguishability) {
    if (!(indistinguishability >= 0.0 && indistinguishability <= 1.0))
        throw std::domain_error("mixed_distribution: indistinguishability must be in [0, 1]");
    Distribution quantum = output_distribution(u, input);
    const Distribution classical = distinguishable_distribution(u, input);
    for (auto& [state, prob] : quantum) {
        const auto it = classical.find(state);
        const double pc = it == classical.end() ? 0.0 : it->second;
        prob = indistinguishability * prob + (1.0 - indistinguishability) * pc;
    }
    return quantum;
}

double two_photon_coincidence_prob(const ModeUnitary& u, const FockState& input,
                                   std::pair<int, int> out_modes, double indistinguishability) {
    if (input.photons() != 2)
        throw std::domain_error("two_photon_coincidence_prob: need exactly two photons");
    const auto in_modes = expand_occupations(input);
    if (in_modes[0] == in_modes[1])
        throw std::domain_error("two_photon_coincidence_prob: photons must enter distinct modes");
    if (!(indistinguishability >= 0.0 && indistinguishability <= 1.0))
        throw std::domain_error("two_photon_coincidence_prob: overlap must be in [0, 1]");
    const auto [c, d] = out_modes;
    const int a = in_modes[0], b = in_modes[1];
    const Complex amp = u(c, a) * u(d, b) + u(c, b) * u(d, a);
    const double p_indist = std::norm(amp);
    const double p_dist = std::norm(u(c, a)) * std::norm(u(d, b)) + std::norm(u(c, b)) * std::norm(u(d, a));
    return indistinguishability * p_indist + (1.0 - indistinguishability) * p_dist;
}

}  // namespace qwsim
