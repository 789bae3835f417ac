// Deterministic sample generation. A small splitmix64 core is used instead of
// <random> distributions so that identical seeds give identical samples (and
// therefore byte-identical reports) on every platform.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "finsler/patch.hpp"

namespace finsler {

class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Point inside the domain box shrunk toward its center by `shrink`
    // (shrink = 1 covers the full box).
    Vec point_in(const Box& box, double shrink = 0.6) {
        Vec c = box.center();
        Vec x(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            double half = 0.5 * (box.hi[i] - box.lo[i]) * shrink;
            x[i] = c[i] + uniform(-half, half);
        }
        return x;
    }

    // Nonzero direction with Euclidean norm in [0.5, 1.5].
    Vec direction(int n) {
        Vec y(static_cast<std::size_t>(n));
        for (;;) {
            double s = 0.0;
            for (auto& v : y) {
                v = uniform(-1.0, 1.0);
                s += v * v;
            }
            if (s > 1e-4) {
                double scale = uniform(0.5, 1.5) / std::sqrt(s);
                for (auto& v : y) v *= scale;
                return y;
            }
        }
    }

    DirectionPoint direction_point(const ManifoldPatch& p, double shrink = 0.6) {
        return {point_in(p.domain(), shrink), direction(p.dim())};
    }

private:
    std::uint64_t state_;
};

}  // namespace finsler
