#pragma once

#include "paravect/para.hpp"

#include <cstdint>

namespace paravect::attention {

/// Shape bundle for one single-head linear attention morphism: token
/// embedding dim d, query/key dim d_k, value dim d_v, sequence length n.
struct AttnDims {
    Index d = 0;
    Index d_k = 0;
    Index d_v = 0;
    Index n = 0;
};

AttnDims makeDims(Index d, Index d_k, Index d_v, Index n);

/// Concrete weight triple. W_Q, W_K are d_k×d, W_V is d_v×d.
struct AttnParams {
    Matrix W_Q;
    Matrix W_K;
    Matrix W_V;
};

/// The morphism's output, split into its three concatenated blocks
/// (q then k then v, each token-major).
struct AttnOutput {
    Vector q; // n*d_k
    Vector k; // n*d_k
    Vector v; // n*d_v
};

Index paramDim(const AttnDims& dims);  // d_k*d + d_k*d + d_v*d
Index inputDim(const AttnDims& dims);  // n*d
Index outputDim(const AttnDims& dims); // n*(2*d_k + d_v)

/// Parameter vector layout: W_Q entries row-major, then W_K, then W_V. This
/// layout is load-bearing for file I/O and must not change.
Vector packParams(const AttnDims& dims, const AttnParams& p);
AttnParams unpackParams(const AttnDims& dims, const Vector& theta);

AttnOutput splitOutput(const AttnDims& dims, const Vector& y);

/// The single-head attention parametric morphism: parameters are the packed
/// (W_Q, W_K, W_V) triple (a direct sum of the three spaces), input is a
/// token-major sequence, output is the concatenated (Q(x), K(x), V(x))
/// triple with each projection applied componentwise per token.
para::ParaMorphism buildAtt(const AttnDims& dims);

/// Token mixing tensored with channel action: mixer ⊗ (W_O·W_V), the square
/// (n·d)×(n·d) linear attention layer used for stacking. The mixer is
/// exogenous input standing in for a frozen attention pattern; nothing here
/// computes it from Q and K.
Matrix layerEndomap(const AttnDims& dims, const AttnParams& params, const Matrix& mixer,
                    const Matrix& W_O);

/// Same map with the d×d channel action given directly.
Matrix layerEndomapOV(const Matrix& mixer, const Matrix& ov);

/// Glue from an AttnOutput back into token space: reads the v block and
/// writes it back through W_O with token mixing, ignoring q and k. This is
/// the canonical adapter for stacking two attention morphisms.
Matrix outputAdapter(const AttnDims& dims, const Matrix& mixer, const Matrix& W_O);

struct FunctorLawReport {
    bool pass = false;
    double identity_residual = 0.0;    // att ∘ (id ⊗ id) vs att
    double composition_residual = 0.0; // id ⊗ (g∘f) vs (id ⊗ g)(id ⊗ f)
    double naturality_residual = 0.0;  // flatten(att,θ)·f vs flatten of att∘(id⊗f)
    double tolerance = 0.0;
    int trials = 0;
};

/// Verifies the identities behind the induced-endofunctor claim on random
/// componentwise token maps f, g (each I_n ⊗ m for a random d×d m):
/// preservation of identities, the tensoring of composites, and naturality
/// of partial application at the given params.
FunctorLawReport checkFunctorLaws(const AttnDims& dims, const AttnParams& params, int trials,
                                  std::uint64_t seed, double tol = 1e-12);

/// Stacks two attention morphisms through the output adapter and checks the
/// flattened composite factorizes as the product of the flattened layers.
ResidualReport checkCompositionStability(const AttnDims& dims, int trials, std::uint64_t seed,
                                         double tol = 1e-10);

/// layerEndomap(m1,OV1)·layerEndomap(m2,OV2) = layerEndomap(m1·m2, OV1·OV2).
ResidualReport checkEndomapProduct(const AttnDims& dims, int trials, std::uint64_t seed,
                                   double tol = 1e-11);

} // namespace paravect::attention
