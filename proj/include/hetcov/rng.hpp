#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace hetcov::mc {

/// xoshiro256++ with splitmix64 seeding. Streams are derived from a
/// (seed, counter) pair so that every simulation iteration owns an
/// independent generator regardless of which worker thread runs it.
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        for (auto& word : state_) word = splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in (0,1); never returns 0 so logs are safe.
    double uniform() {
        const std::uint64_t bits = next_u64() >> 11;  // 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; explicit so streams are portable.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// CN(0,1): unit-variance circularly symmetric complex Gaussian.
    std::complex<double> cnormal() {
        return {normal() * 0.7071067811865475244, normal() * 0.7071067811865475244};
    }

    /// Poisson by Knuth multiplication, chunked so exp(-mean) never
    /// underflows for the means used here (a few hundred at most).
    std::uint32_t poisson(double mean) {
        std::uint32_t total = 0;
        while (mean > 16.0) {
            total += poisson_small(16.0);
            mean -= 16.0;
        }
        return total + poisson_small(mean);
    }

    /// Uniform integer in [0, n).
    std::uint32_t below(std::uint32_t n) {
        if (n <= 1) return 0;
        return static_cast<std::uint32_t>(uniform() * n) % n;
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint32_t poisson_small(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        double prod = 1.0;
        std::uint32_t n = 0;
        do {
            prod *= uniform();
            ++n;
        } while (prod > limit);
        return n - 1;
    }

    std::uint64_t state_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace hetcov::mc
