/*
 * Seeded counter-style PRNG for deterministic Monte Carlo.
 *
 * Stream derivation rule (part of the reproducibility contract):
 *   stream(seed, index) is a splitmix64 sequence whose initial state is
 *     mix64(seed ^ mix64((index + 1) * 0x9E3779B97F4A7C15)),
 *   where mix64 is the splitmix64 finalizer. Every replicate r of an
 *   experiment with master seed s draws from stream(s, r), so results are
 *   independent of scheduling and thread count.
 *
 * Uniform doubles are drawn in the open interval (0,1): quantile transforms
 * of 0 or 1 would be infinite.
 */

#ifndef EVT_RNG_HPP
#define EVT_RNG_HPP

#include <cmath>
#include <cstdint>

#include "evt/errors.hpp"

namespace evt {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix64(seed)) {}

    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        Rng r(0);
        r.state_ = mix64(seed ^ mix64((index + 1) * 0x9E3779B97F4A7C15ULL));
        return r;
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // Strictly inside (0,1): ((x >> 11) + 0.5) * 2^-53.
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform_open()); }

    // Standard unit Pareto: P(Z > z) = 1/z, z >= 1.
    double unit_pareto() { return 1.0 / uniform_open(); }

    // Unit Frechet: F(z) = exp(-1/z), z > 0.
    double unit_frechet() { return -1.0 / std::log(uniform_open()); }

    // Box-Muller; consumes exactly two uniforms per call.
    double normal() {
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Marsaglia-Tsang; rejection, so uniform consumption varies per call.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw domain_error("gamma: shape must be > 0");
        if (shape < 1.0) {
            const double u = uniform_open();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        const double ga = gamma(a);
        const double gb = gamma(b);
        return ga / (ga + gb);
    }

private:
    std::uint64_t state_;
};

} // namespace evt

#endif
