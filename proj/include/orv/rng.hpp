#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "orv/matrix.hpp"

namespace orv {

// Samples are produced in fixed-size chunks, each driven by its own engine
// seeded from (seed, chunk index).  Results therefore depend only on the seed
// and the sample positions, never on how chunks are distributed over threads.
inline constexpr std::size_t kChunkSize = 65536;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t chunk) {
    std::uint64_t state = seed;
    std::uint64_t a = splitmix64(state);
    state ^= chunk * 0xbf58476d1ce4e5b9ULL;
    std::uint64_t b = splitmix64(state);
    return a ^ (b + 0x9e3779b97f4a7c15ULL);
}

}  // namespace detail

// Random source with the distributions the samplers need.  Normal deviates
// use the Box-Muller transform with a cached spare; gamma deviates use the
// Marsaglia-Tsang squeeze for shape >= 1 and the boost trick below 1.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform draw guaranteed strictly positive, safe under log()
    double uniform_pos() {
        for (;;) {
            double u = uniform01();
            if (u > 0.0) return u;
        }
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
        if (shape == 1.0) return -std::log(uniform_pos());
        if (shape < 1.0) {
            const double boosted = gamma(shape + 1.0);
            return boosted * std::pow(uniform_pos(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Dirichlet draw: normalized independent gamma deviates
    void dirichlet(const Vec& shapes, Vec& out) {
        out.resize(shapes.size());
        double total = 0.0;
        for (std::size_t i = 0; i < shapes.size(); ++i) {
            out[i] = gamma(shapes[i]);
            total += out[i];
        }
        if (total <= 0.0) {
            // all components underflowed (tiny shapes); retry
            dirichlet(shapes, out);
            return;
        }
        for (double& v : out) v /= total;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline Rng make_chunk_rng(std::uint64_t seed, std::uint64_t chunk) {
    return Rng(detail::mix_seed(seed, chunk));
}

}  // namespace orv
