#pragma once

#include <cstdint>

#include "weylstrip/matrix.hpp"

namespace weylstrip {

/// Deterministic splitmix64 generator. Self-contained so that seeded runs
/// are byte-identical across standard libraries and platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    Complex complex_in_disc(double radius = 1.0) {
        // rejection sample the unit disc, then scale
        for (;;) {
            const double re = uniform(-1.0, 1.0);
            const double im = uniform(-1.0, 1.0);
            if (re * re + im * im <= 1.0) return radius * Complex(re, im);
        }
    }

    CMatrix matrix(int rows, int cols, double entry_radius = 1.0) {
        CMatrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                m(i, j) = complex_in_disc(entry_radius);
        return m;
    }

    CMatrix hermitian(int n, double entry_radius = 1.0) {
        CMatrix m = matrix(n, n, entry_radius);
        return CMatrix((m + m.adjoint()) / 2.0);
    }

    /// Matrix with ||.|| = radius exactly (operator norm), radius <= 1 gives
    /// a contraction including the boundary.
    CMatrix contraction(int rows, int cols, double radius) {
        CMatrix m = matrix(rows, cols);
        const double s = spectral_norm(m);
        if (s == 0.0) return m;
        return CMatrix(m * (radius / s));
    }

    /// Independent child stream; stable under reordering of sibling forks.
    Rng fork(std::uint64_t salt) {
        Rng child(state_ ^ (0xd1342543de82ef95ULL * (salt + 1)));
        child.next();
        return child;
    }

  private:
    std::uint64_t state_;
};

}  // namespace weylstrip
