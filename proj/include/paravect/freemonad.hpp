#pragma once

#include "paravect/vect.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace paravect::freemonad {

/// The endofunctor X ↦ A ⊗ X for a fixed space A. On objects it scales the
/// dimension; on morphisms it acts as I_A ⊗ f.
struct LinearEndofunctor {
    Index a_dim = 1;

    Index onObject(Index x_dim) const { return a_dim * x_dim; }
    Matrix onMap(const Matrix& f) const {
        return vect::kron(Matrix::Identity(a_dim, a_dim), f);
    }
};

/// Carrier of the depth-N truncated free monad on A ⊗ (−): the graded direct
/// sum ⊕_{k=0}^{N} A^{⊗k} ⊗ X. grade_dims[k] = a_dim^k · x_dim; blocks are
/// laid out grade-major, each grade outer-first (A factors slow, X fast).
struct GradedSpace {
    Index x_dim = 0;
    Index a_dim = 1;
    Index depth = 0; // N
    std::vector<Index> grade_dims;
    std::vector<Index> offsets;
    Index total = 0;

    static GradedSpace make(Index x_dim, Index a_dim, Index depth);
    bool sameShape(const GradedSpace& o) const {
        return x_dim == o.x_dim && a_dim == o.a_dim && depth == o.depth;
    }
};

struct GradedVector {
    GradedSpace space;
    std::vector<Vector> blocks; // blocks[k] has length grade_dims[k]

    Vector flat() const;
};

GradedVector zero(const GradedSpace& space);
GradedVector fromFlat(const GradedSpace& space, const Vector& v);

/// η_X: inject x at grade 0, all higher grades zero.
GradedVector unit(const GradedSpace& space, const Vector& x);

/// The space T(T(X)): same a_dim and depth, base dimension space.total.
/// Leaves of the outer structure are whole T(X) vectors.
GradedSpace nested(const GradedSpace& space);

/// μ_X: flatten one level of nesting. The component at outer grade j, inner
/// grade k is re-labelled into grade j+k — under the outer-first flat
/// indexing that identification is the identity on coordinates — and
/// components with j+k > depth are dropped (truncation semantics).
GradedVector mult(const GradedSpace& space, const GradedVector& outer);

/// η_{T(X)}: embed a T(X) vector as the grade-0 leaf of T(T(X)).
GradedVector unitOuter(const GradedSpace& space, const GradedVector& t);

/// T(η_X): apply the unit to every leaf slot, grade by grade.
GradedVector leafUnit(const GradedSpace& space, const GradedVector& t);

/// T(f) for a leaf transformation f: apply f to each of the a_dim^j slots in
/// every grade-j block. `gv` lives over a space with x_dim = leaf_in.
GradedVector mapLeaves(const GradedVector& gv, Index leaf_in, Index leaf_out,
                       const std::function<Vector(const Vector&)>& f);

/// layer applied k times; k = 0 returns x unchanged.
Vector iterateLayer(const Matrix& layer, Vector x, Index k);

struct MonadLawReport {
    bool pass = false;
    double unit_left = 0.0;  // μ ∘ η_T = id
    double unit_right = 0.0; // μ ∘ Tη = id
    double assoc = 0.0;      // μ ∘ μ_T = μ ∘ Tμ
    int trials = 0;
};

/// Unit laws and associativity on random graded vectors; expected residuals
/// are exactly zero. Unit-law probes are real-valued (each coordinate moves
/// through exactly one relabeling). Associativity probes are integer-valued:
/// the two evaluation orders add the same contributions in a different
/// sequence, and only integer sums keep that reordering exact.
MonadLawReport checkMonadLaws(const GradedSpace& space, int trials, std::uint64_t seed);

/// Collapse along an algebra map a: A → ℝ, grade-wise by a^{⊗k}: grade k
/// contributes the sum over slots weighted by the product of a at the slot's
/// digits. This is the grade-wise morphism into the identity monad.
Vector algebraCollapse(const GradedSpace& space, const Vector& algebra,
                       const GradedVector& gv);

/// Zero every nested component whose total grade exceeds the depth, i.e.
/// restrict T(T(X)) to the part the truncated monad can represent.
GradedVector truncateNested(const GradedSpace& space, GradedVector outer);

/// Exhaustive index-level verification that μ sends the (outer j, inner k)
/// component identically onto grade j+k: every basis vector of T(T(X)) is
/// pushed through mult and compared against an independently predicted
/// coordinate. Exact; intended for small spaces.
ResidualReport checkGradeAdditivity(const GradedSpace& space);

struct FactorizationReport {
    bool pass = false;
    double unit_residual = 0.0;
    double mult_residual = 0.0;
    double tolerance = 0.0;
    int trials = 0;
};

/// Existence half of the universal property, at desk scale: the grade-wise
/// collapse Ψ is a monad morphism into the identity monad on total grade
/// ≤ depth (Ψ∘η = id and Ψ∘μ = Ψ∘TΨ on truncated inputs). Uniqueness is not
/// a finitely checkable statement and is not asserted.
FactorizationReport checkFactorization(const GradedSpace& space, int trials,
                                       std::uint64_t seed, double tol = 1e-11);

} // namespace paravect::freemonad
