#pragma once

#include <string>
#include <vector>

#include "qwsim/types.hpp"

namespace qwsim {

/// An m x m mode transformation, checked unitary on construction.
class ModeUnitary {
public:
    static constexpr double kUnitarityTolerance = 1e-12;

    explicit ModeUnitary(Matrix entries);

    static ModeUnitary identity(int modes);

    int modes() const { return static_cast<int>(u_.rows()); }
    const Matrix& matrix() const { return u_; }
    Complex operator()(int row, int col) const { return u_(row, col); }

    ModeUnitary adjoint() const;

    /// Max-norm deviation of U U^dagger from the identity.
    double unitarity_defect() const;

    /// Row-major JSON matrix form, entries as [re, im] pairs.
    std::string to_json() const;
    static ModeUnitary from_json(const std::string& text);

private:
    Matrix u_;
};

/// Directional-coupler transfer matrix for reflectivity R, symmetric
/// convention: [[sqrt(R), i sqrt(1-R)], [i sqrt(1-R), sqrt(R)]].
ModeUnitary coupler_unitary(double reflectivity);

/// Diagonal phase shifter: e^{i phi} on one mode, identity elsewhere.
ModeUnitary phase_unitary(int modes, int mode, double phi);

/// Apply a k-mode element on the listed modes of an m-mode circuit:
/// returns Embed(local) * global.
ModeUnitary compose_on_modes(const ModeUnitary& global, const ModeUnitary& local,
                             const std::vector<int>& modes);

}  // namespace qwsim
