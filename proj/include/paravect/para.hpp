#pragma once

#include "paravect/vect.hpp"

namespace paravect::para {

/// A parametric 1-morphism between vector spaces: a parameter space of
/// dimension `param_dim` together with a linear map from parameter ⊗ input
/// to output. `map` stores that bilinear map flattened column-wise under the
/// outer-first convention from vect: column (k*in_dim + j) is the image of
/// (parameter basis k) ⊗ (input basis j). Evaluation is linear in the
/// parameter vector and in the data vector separately, by construction.
struct ParaMorphism {
    Index param_dim = 0;
    Index in_dim = 0;
    Index out_dim = 0;
    Matrix map; // out_dim x (param_dim * in_dim)
};

/// Validates map shape against the three dimensions.
ParaMorphism makePara(Index param_dim, Index in_dim, Matrix map);

/// Unit morphism with a 1-dimensional parameter space: evaluate(θ, x) = θ₀·x,
/// so θ = (1) is the identity. A 0-dimensional parameter space could only
/// produce the zero map, hence the extra scalar slot.
ParaMorphism identityPara(Index dim);

/// The morphism whose parameters ARE an out_dim×in_dim matrix (row-major),
/// applied to the input: evaluate(vec(W), x) = W·x.
ParaMorphism matrixPara(Index out_dim, Index in_dim);

/// Lift a plain linear map: param_dim = 1, evaluate((1), x) = f·x.
ParaMorphism fromLinear(const Matrix& f);

Vector evaluate(const ParaMorphism& m, const Vector& theta, const Vector& x);

/// Composite of (Q, g) after (P, f): parameter space Q ⊗ P (g's parameters
/// outer, f's inner), computing g(θ_g, f(θ_f, x)). Under the flat index
/// convention the composite map is g.map · (I_Q ⊗ f.map) with no data
/// shuffling.
ParaMorphism composePara(const ParaMorphism& g, const ParaMorphism& f);

/// Partial application at fixed parameters: the in_dim→out_dim matrix
/// x ↦ evaluate(m, θ, x).
Matrix flatten(const ParaMorphism& m, const Vector& theta);

/// A 2-morphism (P, f) ⇒ (Q, g): a linear map rho : Q → P. The source is the
/// (P, f) side and the target the (Q, g) side, exactly the contravariant
/// direction on parameters. The commuting square g = f ∘ (rho ⊗ id_X) is
/// checked by checkReparam; construction validates shapes and caches the
/// square's residual, but never throws on a failing square — law checking is
/// the product, failures are reported.
struct Reparam {
    ParaMorphism source; // (P, f)
    ParaMorphism target; // (Q, g)
    Matrix rho;          // target.param_dim -> source.param_dim
    double construction_residual = 0.0;
};

struct SquareReport {
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
};

Reparam makeReparam(ParaMorphism source, ParaMorphism target, Matrix rho);

/// Relative residual ‖g − f∘(ρ⊗id)‖_F / max(1, ‖g‖_F) against `tol`.
SquareReport checkReparam(const Reparam& r, double tol = 1e-10);

/// (P,f) ⇒ (Q,g) then (Q,g) ⇒ (R,h) gives (P,f) ⇒ (R,h) with ρ₁·ρ₂.
Reparam verticalCompose(const Reparam& r2, const Reparam& r1);

/// Whiskering of a reparam on the g side with one on the f side across a
/// composite: rho = rho_g ⊗ rho_f on the composite parameter spaces. The
/// category is strict, so no coherence cells appear. Nothing pins this
/// definition down from outside; it is the natural extension for tensored
/// parameter spaces and this library's chosen one, verified by its own law
/// check.
Reparam horizontalCompose(const Reparam& rg, const Reparam& rf);

} // namespace paravect::para
