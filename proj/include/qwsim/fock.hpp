#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

#include "qwsim/types.hpp"

namespace qwsim {

/// Photon occupation numbers over the waveguide modes of a chip.
/// Immutable value type; total photon number is preserved by evolution.
class FockState {
public:
    explicit FockState(std::vector<int> occupations) : occ_(std::move(occupations)) {
        if (occ_.empty()) throw std::domain_error("FockState: need at least one mode");
        for (int k : occ_)
            if (k < 0) throw std::domain_error("FockState: negative occupation");
    }

    static FockState vacuum(int modes) { return FockState(std::vector<int>(modes, 0)); }

    /// Single photons in the listed modes.
    static FockState with_photons_at(int modes, std::initializer_list<int> where) {
        std::vector<int> occ(modes, 0);
        for (int m : where) {
            if (m < 0 || m >= modes) throw std::domain_error("FockState: mode out of range");
            ++occ[m];
        }
        return FockState(std::move(occ));
    }

    int modes() const { return static_cast<int>(occ_.size()); }
    int photons() const { return std::accumulate(occ_.begin(), occ_.end(), 0); }
    int operator[](int mode) const { return occ_.at(mode); }
    const std::vector<int>& occupations() const { return occ_; }

    friend bool operator==(const FockState& a, const FockState& b) { return a.occ_ == b.occ_; }
    friend auto operator<=>(const FockState& a, const FockState& b) { return a.occ_ <=> b.occ_; }

private:
    std::vector<int> occ_;
};

/// All states of `photons` photons in `modes` modes, in a fixed deterministic order.
inline std::vector<FockState> enumerate_fock_states(int modes, int photons) {
    std::vector<FockState> out;
    std::vector<int> occ(modes, 0);
    // recursive stars-and-bars walk
    auto place = [&](auto&& self, int mode, int left) -> void {
        if (mode == modes - 1) {
            occ[mode] = left;
            out.emplace_back(occ);
            return;
        }
        for (int k = left; k >= 0; --k) {
            occ[mode] = k;
            self(self, mode + 1, left - k);
        }
        occ[mode] = 0;
    };
    if (modes >= 1) place(place, 0, photons);
    return out;
}

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace qwsim
