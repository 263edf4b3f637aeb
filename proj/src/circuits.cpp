#include "qwsim/circuits.hpp"

#include <cmath>
#include <istream>
#include <sstream>

namespace qwsim {

ModeUnitary to_unitary(const CircuitSpec& spec) {
    if (spec.mode_count < 1) throw std::domain_error("to_unitary: mode_count must be >= 1");
    ModeUnitary u = ModeUnitary::identity(spec.mode_count);
    for (const auto& element : spec.elements) {
        if (const auto* coupler = std::get_if<CouplerElement>(&element)) {
            const auto [a, b] = coupler->modes;
            if (a == b) throw std::domain_error("to_unitary: coupler needs two distinct modes");
            u = compose_on_modes(u, coupler_unitary(coupler->reflectivity), {a, b});
        } else {
            const auto& phase = std::get<PhaseElement>(element);
            u = compose_on_modes(u, phase_unitary(1, 0, phase.phi), {phase.mode});
        }
    }
    return u;
}

CircuitSpec build_hom() {
    return CircuitSpec{2, {CouplerElement{0.5, {0, 1}}}, "hom_coupler"};
}

std::pair<CircuitSpec, LogicalEncoding> build_cnot() {
    // Modes 0..5: (vc, c0, c1, t0, t1, vt). The central 1/3 coupler joins c1
    // and t0; vc/vt balance the unused rails.
    CircuitSpec spec{6,
                     {
                         CouplerElement{0.5, {3, 4}},
                         CouplerElement{1.0 / 3.0, {0, 1}},
                         CouplerElement{1.0 / 3.0, {2, 3}},
                         CouplerElement{1.0 / 3.0, {4, 5}},
                         CouplerElement{0.5, {3, 4}},
                     },
                     "cnot"};
    // With the symmetric coupler convention two cascaded 50:50 couplers swap
    // the target rails (H'^2 = i X) and the central coupler's two-photon term
    // contributes a Z instead of an X between them. The gate therefore acts
    // as the identity on the target when the control photon travels the rail
    // adjacent to it, and toggles the target otherwise, so logical control 0
    // is carried by mode 2 (c1) and logical control 1 by mode 1 (c0).
    LogicalEncoding enc{{2, 1}, {3, 4}, {0, 5}};
    return {std::move(spec), enc};
}

CircuitSpec build_mzi(double phi) {
    return CircuitSpec{2,
                       {
                           CouplerElement{0.5, {0, 1}},
                           PhaseElement{1, phi},
                           CouplerElement{0.5, {0, 1}},
                       },
                       "mzi"};
}

double phase_from_voltage(double volts, double alpha_rad_per_v2) {
    if (!(alpha_rad_per_v2 > 0.0)) throw std::domain_error("phase_from_voltage: alpha must be > 0");
    return alpha_rad_per_v2 * volts * volts;
}

LogicalDistribution postselect_logical_distribution(const Distribution& dist, const LogicalEncoding& enc) {
    LogicalDistribution out;
    for (const auto& [state, prob] : dist) {
        const int nc = state[enc.control_rails.first] + state[enc.control_rails.second];
        const int nt = state[enc.target_rails.first] + state[enc.target_rails.second];
        if (nc != 1 || nt != 1) continue;
        bool ancilla_hit = false;
        for (int a : enc.ancilla_modes) ancilla_hit |= state[a] > 0;
        if (ancilla_hit) continue;
        const int c = state[enc.control_rails.first] == 1 ? 0 : 1;
        const int t = state[enc.target_rails.first] == 1 ? 0 : 1;
        out.probabilities[(c << 1) | t] += prob;
        out.success_probability += prob;
    }
    if (out.success_probability > 0.0) {
        for (double& p : out.probabilities) p /= out.success_probability;
    } else {
        out.degenerate = true;
    }
    return out;
}

CircuitSpec parse_circuit(std::istream& in, const std::string& label) {
    CircuitSpec spec;
    spec.label = label;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        std::string word;
        if (!(row >> word)) continue;
        const auto fail = [&](const std::string& what) {
            throw ConfigError("circuit line " + std::to_string(line_no) + ": " + what);
        };
        if (word == "modes") {
            if (!(row >> spec.mode_count) || spec.mode_count < 1) fail("expected `modes N` with N >= 1");
        } else if (word == "coupler") {
            CouplerElement c{};
            if (!(row >> c.reflectivity >> c.modes.first >> c.modes.second))
                fail("expected `coupler R a b`");
            spec.elements.emplace_back(c);
        } else if (word == "phase") {
            PhaseElement p{};
            if (!(row >> p.mode >> p.phi)) fail("expected `phase mode radians`");
            spec.elements.emplace_back(p);
        } else {
            fail("unknown directive `" + word + "`");
        }
    }
    if (spec.mode_count < 1) throw ConfigError("circuit: missing `modes N` line");
    to_unitary(spec);  // validates indices and reflectivities
    return spec;
}

std::string format_circuit(const CircuitSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    out << "modes " << spec.mode_count << "\n";
    for (const auto& element : spec.elements) {
        if (const auto* c = std::get_if<CouplerElement>(&element))
            out << "coupler " << c->reflectivity << " " << c->modes.first << " " << c->modes.second << "\n";
        else {
            const auto& p = std::get<PhaseElement>(element);
            out << "phase " << p.mode << " " << p.phi << "\n";
        }
    }
    return out.str();
}

}  // namespace qwsim
