#pragma once

#include "paravect/types.hpp"

#include <vector>

namespace paravect::vect {

/// A permutation of {0,...,n-1}. image[i] is where slot i goes.
struct Permutation {
    Index n = 0;
    std::vector<Index> image;

    static Permutation identity(Index n);
    /// Validates that `image` is a bijection on {0,...,n-1}.
    static Permutation make(std::vector<Index> image);
};

/// (p ∘ q).image[i] = p.image[q.image[i]] — apply q first.
Permutation compose(const Permutation& p, const Permutation& q);
Permutation inverse(const Permutation& p);

Matrix identity(Index n);

/// Validating constructor for matrices arriving from outside the process:
/// checks the payload length and that every entry is finite.
Matrix matrixFromRowMajor(Index rows, Index cols, const std::vector<double>& data);

/// Matrix product g·f. Throws DimensionError naming both shapes when
/// g.cols != f.rows.
Matrix compose(const Matrix& g, const Matrix& f);

/// Kronecker product with the FIRST factor as the outer (slow) index:
/// index(p ⊗ x) = p_index * dim(X) + x_index. Every module in this library
/// inherits this convention; it is what makes the tensor associator the
/// literal identity (see rebracket). Budget-checked before allocation.
template <typename DerivedA, typename DerivedB>
Matrix kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    const Matrix fa = a.derived();
    const Matrix fb = b.derived();
    requireWithinBudget(fa.rows() * fb.rows(), fa.cols() * fb.cols(), "kron");
    Matrix out(fa.rows() * fb.rows(), fa.cols() * fb.cols());
    for (Index i = 0; i < fa.rows(); ++i)
        for (Index j = 0; j < fa.cols(); ++j)
            out.block(i * fb.rows(), j * fb.cols(), fb.rows(), fb.cols()) = fa(i, j) * fb;
    return out;
}

/// Kronecker product of column vectors under the same outer-first indexing:
/// (a ⊗ b)[i*dim(b) + j] = a[i]*b[j].
Vector kronVec(const Vector& a, const Vector& b);

/// Block-diagonal direct sum; off-blocks exactly zero. The 0x0 matrix is the
/// unit.
Matrix directSum(const Matrix& a, const Matrix& b);

/// Permutation representation on n blocks of size `block`: output block
/// p.image[i] reads input block i (equivalently, output block j reads input
/// block p⁻¹(j)). Entries are exactly 0 or 1.
Matrix permMatrix(const Permutation& p, Index block);

/// The associator (Q⊗P)⊗X ≅ Q⊗(P⊗X). Under the fixed outer-first flat
/// indexing both sides index identically, so this IS the identity on
/// dimQ*dimP*dimX. It exists to make the convention explicit and testable.
Matrix rebracket(Index dimQ, Index dimP, Index dimX);

/// Count of singular values above relTol * sigma_max.
Index numericalRank(const Matrix& m, double relTol = 1e-10);

/// ‖a - b‖_F / max(1, ‖b‖_F)
double relativeResidual(const Matrix& a, const Matrix& b);

} // namespace paravect::vect
