#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qwsim/amplitudes.hpp"
#include "qwsim/unitary.hpp"

namespace qwsim {

struct CouplerElement {
    double reflectivity;
    std::pair<int, int> modes;
};

struct PhaseElement {
    int mode;
    double phi;
};

using CircuitElement = std::variant<CouplerElement, PhaseElement>;

/// Ordered coupler/phase-shifter layout of a waveguide chip.
struct CircuitSpec {
    int mode_count = 0;
    std::vector<CircuitElement> elements;
    std::string label;
};

/// Dual-rail qubit assignment on a chip. Rail pairs are ordered
/// (logical-0 rail, logical-1 rail).
struct LogicalEncoding {
    std::pair<int, int> control_rails;
    std::pair<int, int> target_rails;
    std::vector<int> ancilla_modes;
};

/// Ordered product of the embedded element unitaries (first element acts first).
ModeUnitary to_unitary(const CircuitSpec& spec);

/// 50:50 directional coupler on two modes; the Hong-Ou-Mandel test circuit.
CircuitSpec build_hom();

/// Post-selected two-qubit CNOT from 1/2 and 1/3 couplers on six modes,
/// success probability 1/9. See the note in the implementation about which
/// control rail carries logical 0 under the symmetric coupler convention.
std::pair<CircuitSpec, LogicalEncoding> build_cnot();

/// Mach-Zehnder interferometer: 50:50 coupler, phase phi on mode 1, 50:50 coupler.
CircuitSpec build_mzi(double phi);

/// Quadratic thermal tuning curve phi = alpha * v^2.
double phase_from_voltage(double volts, double alpha_rad_per_v2);

struct LogicalDistribution {
    /// probabilities[input 2-bit index] over outputs |00>, |01>, |10>, |11>
    std::array<double, 4> probabilities{};
    double success_probability = 0.0;
    bool degenerate = false;  // no outcome survived post-selection
};

/// Keep outcomes with exactly one photon per rail pair and empty ancillas,
/// renormalize, report the discarded mass via success_probability.
LogicalDistribution postselect_logical_distribution(const Distribution& dist, const LogicalEncoding& enc);

/// Text form used by config files: `modes N` then one `coupler R a b` or
/// `phase mode radians` per line. `#` starts a comment.
CircuitSpec parse_circuit(std::istream& in, const std::string& label = "custom");
std::string format_circuit(const CircuitSpec& spec);

}  // namespace qwsim
