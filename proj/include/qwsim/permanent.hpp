#pragma once

#include <bit>
#include <cstdint>

#include "qwsim/types.hpp"

namespace qwsim {

/// Permanent of a square complex matrix.
///
/// Direct expansion up to 2x2, Glynn's formula with Gray-code updates above
/// that (2^{n-1} sign vectors, one column-sum update per step). Intended for
/// the few-photon matrices that show up here, not for large n.
inline Complex permanent(const Matrix& a) {
    const Index n = a.rows();
    if (n != a.cols()) throw std::domain_error("permanent: matrix must be square");
    if (n == 0) return Complex(1.0, 0.0);
    if (n == 1) return a(0, 0);
    if (n == 2) return a(0, 0) * a(1, 1) + a(0, 1) * a(1, 0);

    // Glynn: Per(A) = 2^{1-n} * sum over delta in {+-1}^n, delta_0 = +1, of
    // (prod_i delta_i) * prod_j (sum_i delta_i A(i,j)).
    Eigen::RowVectorXcd colsum = a.colwise().sum();
    Complex total(0.0, 0.0);
    const std::uint64_t steps = 1ULL << (n - 1);
    std::uint64_t gray = 0;
    double sign_product = 1.0;  // prod_i delta_i
    for (std::uint64_t k = 0;;) {
        Complex term(1.0, 0.0);
        for (Index j = 0; j < n; ++j) term *= colsum(j);
        total += sign_product * term;
        if (++k == steps) break;
        const std::uint64_t next_gray = k ^ (k >> 1);
        const int bit = std::countr_zero(gray ^ next_gray);
        const Index flipped_row = bit + 1;  // delta_0 is pinned to +1
        gray = next_gray;
        const double delta_change = (next_gray >> bit) & 1 ? -2.0 : 2.0;
        colsum += delta_change * a.row(flipped_row);
        sign_product = -sign_product;
    }
    return total / static_cast<double>(1ULL << (n - 1));
}

}  // namespace qwsim
