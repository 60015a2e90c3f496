#ifndef QUADTOPE_RNG_HPP
#define QUADTOPE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace quadtope {

// Counter-based generator: every draw is a pure function of (seed, stream,
// counter), so concurrent consumers can index into disjoint streams without
// sharing state and runs replay bit-for-bit from the recorded seed.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), counter_(0) {}

    std::uint64_t next_u64() { return mix(seed_, stream_, counter_++); }

    // Uniform in [0,1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo,hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Standard normal via Box-Muller; consumes two draws per call.
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // Uniform point on the unit sphere S^l in R^{l+1}.
    std::vector<double> sphere_point(int l) {
        std::vector<double> v(static_cast<std::size_t>(l) + 1);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& c : v) {
                c = next_gaussian();
                norm2 += c * c;
            }
        } while (norm2 < 1e-12);
        double inv = 1.0 / std::sqrt(norm2);
        for (auto& c : v) c *= inv;
        return v;
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
        // splitmix64 finalizer applied to a combined key
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1) + counter;
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_;
};

}  // namespace quadtope

#endif
