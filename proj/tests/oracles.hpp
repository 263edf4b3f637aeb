// Test-only reference implementations, kept independent of the permanent
// code path they are checking.
#pragma once

#include <map>
#include <vector>

#include <Eigen/QR>

#include "qwsim/fock.hpp"
#include "qwsim/rng.hpp"
#include "qwsim/types.hpp"

namespace qwsim::oracle {

/// Feynman path sum: expand the product of evolved creation operators over
/// every assignment of input photons to output modes and collect amplitudes
/// per output occupation.
inline std::map<FockState, double> feynman_distribution(const Matrix& u, const FockState& input) {
    const int m = static_cast<int>(u.rows());
    std::vector<int> photons;
    for (int mode = 0; mode < m; ++mode)
        for (int k = 0; k < input[mode]; ++k) photons.push_back(mode);
    const int n = static_cast<int>(photons.size());

    std::map<std::vector<int>, Complex> amplitudes;
    std::vector<int> assign(n, 0);
    for (;;) {
        Complex amp(1.0, 0.0);
        std::vector<int> occ(m, 0);
        for (int k = 0; k < n; ++k) {
            amp *= u(assign[k], photons[k]);
            ++occ[assign[k]];
        }
        amplitudes[occ] += amp;
        int k = 0;
        while (k < n && ++assign[k] == m) assign[k++] = 0;
        if (k == n) break;
    }

    double in_fact = 1.0;
    for (int mode = 0; mode < m; ++mode) in_fact *= factorial(input[mode]);

    std::map<FockState, double> dist;
    for (const auto& [occ, amp] : amplitudes) {
        double out_fact = 1.0;
        for (int k : occ) out_fact *= factorial(k);
        dist.emplace(FockState(occ), std::norm(amp) * out_fact / in_fact);
    }
    return dist;
}

/// Classical two-photon probabilities by direct expansion (photons labelled,
/// each routed through |u|^2 independently).
inline double classical_pair_prob(const Matrix& u, int in_a, int in_b, int out_c, int out_d) {
    auto p = [&](int row, int col) { return std::norm(u(row, col)); };
    if (out_c == out_d) return p(out_c, in_a) * p(out_c, in_b);
    return p(out_c, in_a) * p(out_d, in_b) + p(out_d, in_a) * p(out_c, in_b);
}

/// Haar-like random unitary: QR of a complex Ginibre matrix with the R
/// diagonal phases folded back in.
inline Matrix haar_unitary(int m, Rng& rng) {
    Matrix g(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) g(r, c) = Complex(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r_mat = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < m; ++c) {
        const Complex d = r_mat(c, c);
        q.col(c) *= d / std::abs(d);
    }
    return q;
}

/// Random occupation of n photons over m modes.
inline FockState random_state(int m, int n, Rng& rng) {
    std::vector<int> occ(m, 0);
    for (int k = 0; k < n; ++k) ++occ[rng.below(static_cast<std::uint64_t>(m))];
    return FockState(occ);
}

}  // namespace qwsim::oracle
