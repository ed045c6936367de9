#pragma once

#include "paravect/para.hpp"

#include <utility>
#include <vector>

namespace paravect::circuits {

/// One attention head's weights. W_Q, W_K, W_V are d_head×d_model and W_O is
/// d_model×d_head, so both factored circuits are d_model-square with rank at
/// most d_head.
struct HeadWeights {
    Matrix W_Q;
    Matrix W_K;
    Matrix W_V;
    Matrix W_O;
};

HeadWeights makeHead(Matrix W_Q, Matrix W_K, Matrix W_V, Matrix W_O);
Index dModel(const HeadWeights& h);
Index dHead(const HeadWeights& h);

/// A head together with its frozen attention pattern. The mixer is exogenous
/// n×n input; it is never computed from Q and K here.
struct AttachedHead {
    HeadWeights head;
    Matrix mixer;
};

/// Attention-only residual-stream model: embed, layers of parallel heads,
/// unembed. Each layer acts as (identity + Σ_heads contribution).
struct ToyModel {
    Index d_model = 0;
    Index d_vocab = 0;
    Index n = 0;
    Matrix W_E; // d_model × d_vocab
    Matrix W_U; // d_vocab × d_model
    std::vector<std::vector<AttachedHead>> layers;
};

/// Throws ParseError naming the offending field on any shape violation.
void validateModel(const ToyModel& m);

/// The bilinear form W_Qᵀ·W_K governing attention scores.
Matrix qkCircuit(const HeadWeights& h);

/// The map W_O·W_V by which an attended token's value writes into the
/// destination token's stream.
Matrix ovCircuit(const HeadWeights& h);

/// mixer ⊗ ovCircuit(h): token mixing tensored with the channel action.
Matrix headContribution(const HeadWeights& h, const Matrix& mixer);

/// One residual route through the model: which head (if any) was taken in
/// each layer, in layer order, plus that route's end-to-end linear
/// contribution to the logits. An empty sequence is the direct path.
struct PathTerm {
    std::vector<std::pair<Index, Index>> heads; // (layer, head)
    Matrix flat_map;                            // (n·d_vocab) × (n·d_vocab)
};

/// Every residual route: per layer either skip or pass through exactly one
/// head. Terms are ordered lexicographically by their layer/head sequence.
/// Throws BudgetError beyond max_paths.
std::vector<PathTerm> expandPaths(const ToyModel& m, Index n, std::size_t max_paths = 4096);

/// The monolithic forward map (I⊗W_U) · Π_layers(I + Σ_heads contribution) ·
/// (I⊗W_E), later layers leftmost.
Matrix forwardMap(const ToyModel& m, Index n);

struct PathSumReport {
    bool pass = false;
    double residual = 0.0;
    std::size_t path_count = 0;
    double tolerance = 0.0;
};

/// Σ of path contributions against the monolithic forward map — the residual
/// stream distributes over routes, so these must agree.
PathSumReport checkPathSum(const ToyModel& m, Index n, double tol = 1e-10);

/// Composition of OV circuits across heads: the effective circuit of one
/// head reading what another wrote. Rank bounded by the smaller head dim.
Matrix virtualHead(const HeadWeights& h2, const HeadWeights& h1);

struct ParaCoherenceReport {
    bool pass = false;
    double residual = 0.0;
    Index composite_param_dim = 0;
    double tolerance = 0.0;
};

/// Rebuilds each layer as a parametric morphism — per head the parameter
/// space is mixer-entries ⊗ OV-entries, the faithful bilinear choice, plus a
/// scalar slot for the residual identity — composes the layers as parametric
/// morphisms, flattens at the model's actual parameter values, and compares
/// with the monolithic forward map. Composite parameter dimension grows
/// multiplicatively with depth; the element budget applies.
ParaCoherenceReport circuitsAsPara(const ToyModel& m, Index n, double tol = 1e-10);

/// Attention scores S[dst,src] = (W_Q x_dst)·(W_K x_src) for an n-token
/// input, computed through the explicit projections. No softmax, no
/// 1/sqrt(d_k) scaling. Agrees with the x_dstᵀ·W_QK·x_src route through
/// qkCircuit (the factorization identity).
Matrix attentionScores(const HeadWeights& h, const Vector& X, Index n);

} // namespace paravect::circuits
