#pragma once

#include "paravect/vect.hpp"

#include <random>
#include <string_view>

namespace paravect {

/// Deterministic pseudorandom stream. Substreams are derived from a root
/// seed plus a stream name (FNV-1a of the name mixed into the seed), so every
/// named check owns an independent stream and adding checks never perturbs
/// existing ones. Doubles are built from raw 64-bit draws rather than
/// std::uniform_real_distribution, keeping byte-identical replay across
/// standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}
    Rng(std::uint64_t root, std::string_view substream)
        : gen_(mix(root ^ fnv1a(substream))) {}

    std::uint64_t bits() { return gen_(); }

    double uniform(double lo = -1.0, double hi = 1.0) {
        // 53 random mantissa bits -> [0, 1)
        const double u = static_cast<double>(bits() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

    /// Inclusive on both ends.
    Index integer(Index lo, Index hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<Index>(bits() % span);
    }

    Vector vector(Index n, double lo = -1.0, double hi = 1.0) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    /// Integer-valued entries. Sums of these stay exact in double precision,
    /// which lets bookkeeping laws be checked bit-for-bit.
    Vector intVector(Index n, Index lo = -8, Index hi = 8) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v[i] = static_cast<double>(integer(lo, hi));
        return v;
    }

    Matrix matrix(Index rows, Index cols, double lo = -1.0, double hi = 1.0) {
        Matrix m(rows, cols);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
        return m;
    }

    vect::Permutation permutation(Index n) {
        auto p = vect::Permutation::identity(n);
        for (Index i = n - 1; i > 0; --i)
            std::swap(p.image[static_cast<std::size_t>(i)],
                      p.image[static_cast<std::size_t>(integer(0, i))]);
        return p;
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return h;
    }

  private:
    // splitmix64 finalizer, so nearby seeds land far apart.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 gen_;
};

} // namespace paravect
