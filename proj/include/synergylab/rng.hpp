#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace synergylab {

// splitmix64; used both as a generator and to derive independent streams
// from (seed, index) pairs. Distribution sampling is implemented here
// rather than with <random> adaptors so that generated corpora are
// byte-identical across standard libraries.
class Rng {
  public:
    explicit Rng(uint64_t seed) {
        // spread the raw seed so adjacent integers start distant streams;
        // sequential seeds otherwise share the counter lattice
        uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        state_ = z ^ (z >> 31);
    }

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    uint64_t next_below(uint64_t n) {
        // rejection sampling keeps the distribution exact
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    double normal(double mean = 0.0, double sd = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + sd * spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return mean + sd * u * m;
    }

    // inversion by sequential search; fine for the small rates used here
    uint64_t poisson(double lambda) {
        double l = std::exp(-lambda);
        double p = 1.0;
        uint64_t k = 0;
        do {
            ++k;
            p *= next_double();
        } while (p > l);
        return k - 1;
    }

    // derive an independent stream, e.g. per bootstrap resample
    static Rng stream(uint64_t seed, uint64_t index) {
        Rng mix(seed ^ (0x85ebca6bULL * (index + 1)));
        mix.next_u64();
        return Rng(mix.next_u64());
    }

  private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Samples an index from a discrete distribution given cumulative weights.
inline size_t sample_cdf(const std::vector<double>& cdf, double u) {
    size_t lo = 0, hi = cdf.size();
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (u < cdf[mid]) hi = mid; else lo = mid + 1;
    }
    return lo < cdf.size() ? lo : cdf.size() - 1;
}

} // namespace synergylab
