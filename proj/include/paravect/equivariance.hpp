#pragma once

#include "paravect/vect.hpp"

namespace paravect::equivariance {

/// Componentwise extension of a per-token map to n-token sequences:
/// I_n ⊗ per_token (token index outer).
Matrix extend(const Matrix& per_token, Index n);

struct EquivarianceReport {
    bool pass = false;
    double max_abs_diff = 0.0;
    /// "exact" when the two composites matched bit-for-bit; "tolerance" when
    /// a kernel reordered accumulations and the 1e-14 absolute fallback was
    /// used instead.
    const char* mode = "exact";
};

/// Both composites of the extended map with the permutation representation:
/// extend(f, n) ∘ R_σ versus R_σ ∘ extend(f, n). The two sides perform the
/// same multiplications in permuted order, so exact equality is expected.
EquivarianceReport checkEquivariance(const Matrix& per_token, const vect::Permutation& sigma);

struct CommutatorReport {
    bool commutes = false;
    double commutator_norm = 0.0; // ‖M·R_σ − R_σ·M‖_F
};

/// For a map on sequence space that couples token positions, measures how
/// badly it fails to commute with the permutation representation. Zero only
/// when the map commutes with that particular σ.
CommutatorReport symmetryBreakingWitness(const Matrix& coupled, const vect::Permutation& sigma);

} // namespace paravect::equivariance
