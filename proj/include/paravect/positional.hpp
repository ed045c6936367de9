#pragma once

#include "paravect/types.hpp"

#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace paravect::positional {

/// Strictly additive scheme p(m) = m·base. Additivity and p(0) = 0 hold by
/// construction; the checks below re-verify them numerically anyway.
struct AdditiveEncoding {
    Index dim = 0;
    Vector base;
};

/// Interleaved sin/cos channels at geometrically spaced frequencies:
/// channel 2j = sin(m / base_freq^(2j/dim)), channel 2j+1 the cosine. dim
/// must be even.
struct SinusoidalEncoding {
    Index dim = 0;
    double base_freq = 10000.0;
};

/// A finite lookup table, e.g. a learned embedding loaded from a file.
struct ExternalEncoding {
    Index dim = 0;
    std::vector<Vector> table;
};

using Encoding = std::variant<AdditiveEncoding, SinusoidalEncoding, ExternalEncoding>;

AdditiveEncoding makeAdditive(Vector base);
SinusoidalEncoding makeSinusoidal(Index dim, double base_freq = 10000.0);
ExternalEncoding makeExternal(std::vector<Vector> table);

Index dim(const Encoding& e);

/// Largest position the encoding is defined for, when finite.
std::optional<Index> domainSize(const Encoding& e);

/// The position vector p(m). Throws for out-of-range positions of an
/// external table.
Vector encode(const Encoding& e, Index m);

/// The affine translation x ↦ x + p(m). Deliberately a function on vectors,
/// not a Matrix: translations are affine, not linear, and representing them
/// as matrices would misstate what they are.
Vector shift(const AdditiveEncoding& e, Index m, const Vector& x);

struct ActionLawReport {
    bool pass = false;
    double origin_residual = 0.0; // ‖p(0)‖
    double max_defect = 0.0;      // max ‖p(m+m') − p(m) − p(m')‖
    std::optional<std::pair<Index, Index>> witness; // first failing (m, m')
    double tolerance = 0.0;
};

/// Verifies p(0) = 0 and p(m+m') = p(m) + p(m') over all m, m' ≤ max_m
/// (clipped to the encoding's domain). Failures carry a concrete witness
/// pair.
ActionLawReport checkActionLaws(const Encoding& e, Index max_m, double tol = 1e-12);

struct InjectivityReport {
    bool pass = false;
    double min_distance = 0.0;
    std::pair<Index, Index> argmin{0, 0};
    double tolerance = 0.0;
};

/// Minimum pairwise Euclidean distance among p(0..N-1); ties resolved to the
/// lexicographically first pair.
InjectivityReport checkInjectivity(const Encoding& e, Index N, double tol);

struct AdditivityWitness {
    Index m = 0;
    Index m2 = 0;
    double defect = 0.0;
};

/// The (m, m') with the largest additivity defect over the search range, or
/// nullopt when every defect is ≤ 1e-12 (i.e. the encoding is additive as
/// far as the search can see).
std::optional<AdditivityWitness> nonadditivityWitness(const Encoding& e, Index max_m);

struct FactorResult {
    Matrix f; // q.dim × p.dim
    double max_residual = 0.0;
    Index rank = 0;
    bool unique = false;
};

/// Least-squares solve for the linear map with f·p(m) ≈ q(m) over positions
/// 0..N-1. rank is the numerical rank of the stacked p matrix (threshold
/// σ_max·1e-10); the factorization is unique exactly when that matrix has
/// full column rank, which is reported rather than assumed.
FactorResult factorThrough(const Encoding& p, const Encoding& q, Index N);

} // namespace paravect::positional
