#ifndef FLUCTLAB_RNG_HPP
#define FLUCTLAB_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace fluctlab {

// Seeded generator used by every randomized routine in the toolkit.  The
// mapping from raw mt19937_64 output to doubles is pinned here (instead of
// going through std:: distributions) so that a seed reproduces the same
// stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Inclusive integer range via rejection-free modulo of a wide draw.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    // Standard normal via Box-Muller (no cached state).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Complex standard normal, unit total variance.
    std::complex<double> normal_complex() {
        const double re = normal();
        const double im = normal();
        return {re * 0.7071067811865475244, im * 0.7071067811865475244};
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace fluctlab

#endif
