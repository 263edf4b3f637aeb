#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>

namespace qwsim {

/// splitmix64; used to spread a master seed into independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive the seed for one labelled substream of a master seed. Streams with
/// distinct (stream, channel) labels are statistically independent, so scan
/// points can run concurrently and still reduce to bit-identical output.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t channel = 0) {
    std::uint64_t s = master ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
    s ^= channel * 0xd6e8feb86659fd93ULL;
    splitmix64(s);
    return splitmix64(s);
}

namespace detail {

/// Ziggurat tables for the normal (128 layers) and exponential (256 layers)
/// samplers, Marsaglia-Tsang layout.
struct ZigguratTables {
    std::uint32_t kn[128];
    double wn[128], fn[128];
    std::uint32_t ke[256];
    double we[256], fe[256];

    ZigguratTables() {
        const double m1 = 2147483648.0;  // 2^31
        double dn = 3.442619855899, tn = dn;
        const double vn = 9.91256303526217e-3;
        double q = vn / std::exp(-0.5 * dn * dn);
        kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
        kn[1] = 0;
        wn[0] = q / m1;
        wn[127] = dn / m1;
        fn[0] = 1.0;
        fn[127] = std::exp(-0.5 * dn * dn);
        for (int i = 126; i >= 1; --i) {
            dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
            kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
            tn = dn;
            fn[i] = std::exp(-0.5 * dn * dn);
            wn[i] = dn / m1;
        }

        const double m2 = 4294967296.0;  // 2^32
        double de = 7.697117470131487, te = de;
        const double ve = 3.949659822581572e-3;
        q = ve / std::exp(-de);
        ke[0] = static_cast<std::uint32_t>((de / q) * m2);
        ke[1] = 0;
        we[0] = q / m2;
        we[255] = de / m2;
        fe[0] = 1.0;
        fe[255] = std::exp(-de);
        for (int i = 254; i >= 1; --i) {
            de = -std::log(ve / de + std::exp(-de));
            ke[i + 1] = static_cast<std::uint32_t>((de / te) * m2);
            te = de;
            fe[i] = std::exp(-de);
            we[i] = de / m2;
        }
    }
};

inline const ZigguratTables& ziggurat() {
    static const ZigguratTables tables;
    return tables;
}

}  // namespace detail

/// Deterministic random stream. Distribution sampling is implemented here
/// rather than through std:: distributions so sequences are identical across
/// standard libraries; normal and exponential draws use the ziggurat method
/// since the event pipeline consumes them by the hundreds of millions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    std::uint32_t next_u32() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const std::uint64_t bits = engine_();
        cached_ = static_cast<std::uint32_t>(bits);
        have_cached_ = true;
        return static_cast<std::uint32_t>(bits >> 32);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) {
        if (p >= 1.0) return true;
        if (p <= 0.0) return false;
        return next_u32() < static_cast<std::uint32_t>(p * 4294967296.0);
    }

    /// Standard normal (ziggurat, 128 layers).
    double normal() {
        const auto& z = detail::ziggurat();
        for (;;) {
            const auto hz = static_cast<std::int32_t>(next_u32());
            const int iz = hz & 127;
            if (static_cast<std::uint32_t>(std::abs(hz)) < z.kn[iz]) return hz * z.wn[iz];
            // edge of the layer or the tail
            if (iz == 0) {
                constexpr double r = 3.442619855899;
                double x, y;
                do {
                    x = -std::log(positive_uniform()) / r;
                    y = -std::log(positive_uniform());
                } while (y + y < x * x);
                return hz > 0 ? r + x : -(r + x);
            }
            const double x = hz * z.wn[iz];
            if (z.fn[iz] + uniform() * (z.fn[iz - 1] - z.fn[iz]) < std::exp(-0.5 * x * x)) return x;
        }
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Exponential with the given mean (inverse rate); ziggurat, 256 layers.
    double exponential(double mean) {
        const auto& z = detail::ziggurat();
        for (;;) {
            const std::uint32_t jz = next_u32();
            const int iz = jz & 255;
            if (jz < z.ke[iz]) return mean * (jz * z.we[iz]);
            if (iz == 0) return mean * (7.697117470131487 - std::log(positive_uniform()));
            const double x = jz * z.we[iz];
            if (z.fe[iz] + uniform() * (z.fe[iz - 1] - z.fe[iz]) < std::exp(-x)) return mean * x;
        }
    }

    /// Poisson count; inversion for small means, normal approximation above.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 60.0) {
            const double limit = std::exp(-mean);
            std::uint64_t k = 0;
            double p = uniform();
            while (p > limit) {
                ++k;
                p *= uniform();
            }
            return k;
        }
        const double x = std::round(normal(mean, std::sqrt(mean)));
        return x < 0.0 ? 0 : static_cast<std::uint64_t>(x);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    double positive_uniform() {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return u;
    }

    std::mt19937_64 engine_;
    std::uint32_t cached_ = 0;
    bool have_cached_ = false;
};

}  // namespace qwsim
