#include "qwsim/unitary.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

namespace qwsim {

ModeUnitary::ModeUnitary(Matrix entries) : u_(std::move(entries)) {
    if (u_.rows() < 1 || u_.rows() != u_.cols())
        throw std::domain_error("ModeUnitary: matrix must be square, m >= 1");
    const double defect = unitarity_defect();
    if (defect > kUnitarityTolerance)
        throw std::domain_error("ModeUnitary: not unitary (defect " + std::to_string(defect) + ")");
}

ModeUnitary ModeUnitary::identity(int modes) {
    return ModeUnitary(Matrix::Identity(modes, modes));
}

ModeUnitary ModeUnitary::adjoint() const { return ModeUnitary(u_.adjoint()); }

double ModeUnitary::unitarity_defect() const {
    const Matrix residual = u_ * u_.adjoint() - Matrix::Identity(u_.rows(), u_.cols());
    return residual.cwiseAbs().maxCoeff();
}

std::string ModeUnitary::to_json() const {
    nlohmann::json entries = nlohmann::json::array();
    for (Index r = 0; r < u_.rows(); ++r)
        for (Index c = 0; c < u_.cols(); ++c)
            entries.push_back({u_(r, c).real(), u_(r, c).imag()});
    return nlohmann::json{{"modes", u_.rows()}, {"entries", entries}}.dump();
}

ModeUnitary ModeUnitary::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const Index m = j.at("modes").get<Index>();
    const auto& entries = j.at("entries");
    if (static_cast<Index>(entries.size()) != m * m)
        throw std::domain_error("ModeUnitary::from_json: entry count does not match modes");
    Matrix u(m, m);
    Index k = 0;
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c, ++k)
            u(r, c) = Complex(entries[k][0].get<double>(), entries[k][1].get<double>());
    return ModeUnitary(std::move(u));
}

ModeUnitary coupler_unitary(double reflectivity) {
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0))
        throw std::domain_error("coupler_unitary: reflectivity must be in [0, 1]");
    const double t = std::sqrt(reflectivity);
    const double r = std::sqrt(1.0 - reflectivity);
    Matrix u(2, 2);
    u << Complex(t, 0.0), Complex(0.0, r),
         Complex(0.0, r), Complex(t, 0.0);
    return ModeUnitary(std::move(u));
}

ModeUnitary phase_unitary(int modes, int mode, double phi) {
    if (mode < 0 || mode >= modes) throw std::domain_error("phase_unitary: mode out of range");
    Matrix u = Matrix::Identity(modes, modes);
    u(mode, mode) = std::polar(1.0, phi);
    return ModeUnitary(std::move(u));
}

ModeUnitary compose_on_modes(const ModeUnitary& global, const ModeUnitary& local,
                             const std::vector<int>& modes) {
    const int m = global.modes();
    if (static_cast<int>(modes.size()) != local.modes())
        throw std::domain_error("compose_on_modes: index count does not match local size");
    std::set<int> seen;
    for (int i : modes) {
        if (i < 0 || i >= m) throw std::domain_error("compose_on_modes: mode index out of range");
        if (!seen.insert(i).second) throw std::domain_error("compose_on_modes: duplicate mode index");
    }
    Matrix embedded = Matrix::Identity(m, m);
    for (std::size_t a = 0; a < modes.size(); ++a)
        for (std::size_t b = 0; b < modes.size(); ++b)
            embedded(modes[a], modes[b]) = local(static_cast<int>(a), static_cast<int>(b));
    return ModeUnitary(embedded * global.matrix());
}

}  // namespace qwsim
