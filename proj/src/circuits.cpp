#include "paravect/circuits.hpp"

#include <algorithm>

namespace paravect::circuits {

HeadWeights makeHead(Matrix W_Q, Matrix W_K, Matrix W_V, Matrix W_O) {
    HeadWeights h{std::move(W_Q), std::move(W_K), std::move(W_V), std::move(W_O)};
    const Index d_head = h.W_Q.rows();
    const Index d_model = h.W_Q.cols();
    auto check = [&](const Matrix& w, const char* name, Index rows, Index cols) {
        if (w.rows() != rows || w.cols() != cols)
            throw DimensionError(std::string("HeadWeights: ") + name + " is " +
                                 shapeString(w.rows(), w.cols()) + ", expected " +
                                 shapeString(rows, cols));
    };
    check(h.W_K, "W_K", d_head, d_model);
    check(h.W_V, "W_V", d_head, d_model);
    check(h.W_O, "W_O", d_model, d_head);
    return h;
}

Index dModel(const HeadWeights& h) { return h.W_Q.cols(); }
Index dHead(const HeadWeights& h) { return h.W_Q.rows(); }

void validateModel(const ToyModel& m) {
    auto field = [](std::size_t l, std::size_t h, const char* name) {
        return "layers[" + std::to_string(l) + "][" + std::to_string(h) + "]." + name;
    };
    if (m.d_model < 1) throw ParseError("d_model: must be positive");
    if (m.d_vocab < 1) throw ParseError("d_vocab: must be positive");
    if (m.n < 1) throw ParseError("n: must be positive");
    if (m.W_E.rows() != m.d_model || m.W_E.cols() != m.d_vocab)
        throw ParseError("W_E: expected " + shapeString(m.d_model, m.d_vocab) + ", got " +
                         shapeString(m.W_E.rows(), m.W_E.cols()));
    if (m.W_U.rows() != m.d_vocab || m.W_U.cols() != m.d_model)
        throw ParseError("W_U: expected " + shapeString(m.d_vocab, m.d_model) + ", got " +
                         shapeString(m.W_U.rows(), m.W_U.cols()));
    for (std::size_t l = 0; l < m.layers.size(); ++l)
        for (std::size_t h = 0; h < m.layers[l].size(); ++h) {
            const auto& ah = m.layers[l][h];
            const Index d_head = ah.head.W_Q.rows();
            auto check = [&](const Matrix& w, const char* name, Index rows, Index cols) {
                if (w.rows() != rows || w.cols() != cols)
                    throw ParseError(field(l, h, name) + ": expected " +
                                     shapeString(rows, cols) + ", got " +
                                     shapeString(w.rows(), w.cols()));
            };
            check(ah.head.W_Q, "W_Q", d_head, m.d_model);
            check(ah.head.W_K, "W_K", d_head, m.d_model);
            check(ah.head.W_V, "W_V", d_head, m.d_model);
            check(ah.head.W_O, "W_O", m.d_model, d_head);
            check(ah.mixer, "mixer", m.n, m.n);
        }
}

Matrix qkCircuit(const HeadWeights& h) {
    if (h.W_Q.rows() != h.W_K.rows() || h.W_Q.cols() != h.W_K.cols())
        throw DimensionError("qkCircuit: W_Q is " + shapeString(h.W_Q.rows(), h.W_Q.cols()) +
                             " but W_K is " + shapeString(h.W_K.rows(), h.W_K.cols()));
    return h.W_Q.transpose() * h.W_K;
}

Matrix ovCircuit(const HeadWeights& h) {
    if (h.W_O.cols() != h.W_V.rows())
        throw DimensionError("ovCircuit: W_O is " + shapeString(h.W_O.rows(), h.W_O.cols()) +
                             " but W_V is " + shapeString(h.W_V.rows(), h.W_V.cols()));
    return h.W_O * h.W_V;
}

Matrix headContribution(const HeadWeights& h, const Matrix& mixer) {
    if (mixer.rows() != mixer.cols())
        throw DimensionError("headContribution: mixer is " +
                             shapeString(mixer.rows(), mixer.cols()) + ", must be square");
    return vect::kron(mixer, ovCircuit(h));
}

namespace {

void requireSequenceLength(const ToyModel& m, Index n) {
    if (n < 1) throw DimensionError("sequence length must be positive");
    if (m.n != n)
        throw DimensionError("model is configured for n=" + std::to_string(m.n) +
                             ", requested n=" + std::to_string(n));
    validateModel(m);
}

Matrix embedLift(const ToyModel& m, Index n) {
    return vect::kron(Matrix::Identity(n, n), m.W_E);
}

Matrix unembedLift(const ToyModel& m, Index n) {
    return vect::kron(Matrix::Identity(n, n), m.W_U);
}

} // namespace

std::vector<PathTerm> expandPaths(const ToyModel& m, Index n, std::size_t max_paths) {
    requireSequenceLength(m, n);
    std::size_t count = 1;
    for (const auto& layer : m.layers) {
        count *= layer.size() + 1;
        if (count > max_paths)
            throw BudgetError("expandPaths: route count exceeds limit of " +
                              std::to_string(max_paths));
    }

    const Matrix embed = embedLift(m, n);
    const Matrix unembed = unembedLift(m, n);
    std::vector<PathTerm> terms;
    terms.reserve(count);

    // One route = one choice per layer: skip, or exactly one head.
    std::vector<Index> choice(m.layers.size(), -1);
    auto emit = [&]() {
        PathTerm term;
        Matrix acc = embed;
        for (std::size_t l = 0; l < m.layers.size(); ++l) {
            if (choice[l] < 0) continue;
            const auto& ah = m.layers[l][static_cast<std::size_t>(choice[l])];
            term.heads.emplace_back(static_cast<Index>(l), choice[l]);
            acc = headContribution(ah.head, ah.mixer) * acc;
        }
        term.flat_map = unembed * acc;
        terms.push_back(std::move(term));
    };
    auto recurse = [&](auto&& self, std::size_t l) -> void {
        if (l == m.layers.size()) {
            emit();
            return;
        }
        for (Index c = -1; c < static_cast<Index>(m.layers[l].size()); ++c) {
            choice[l] = c;
            self(self, l + 1);
        }
    };
    recurse(recurse, 0);

    std::sort(terms.begin(), terms.end(),
              [](const PathTerm& a, const PathTerm& b) { return a.heads < b.heads; });
    return terms;
}

Matrix forwardMap(const ToyModel& m, Index n) {
    requireSequenceLength(m, n);
    Matrix acc = embedLift(m, n);
    for (const auto& layer : m.layers) {
        Matrix step = Matrix::Identity(n * m.d_model, n * m.d_model);
        for (const auto& ah : layer) step += headContribution(ah.head, ah.mixer);
        acc = step * acc;
    }
    return unembedLift(m, n) * acc;
}

PathSumReport checkPathSum(const ToyModel& m, Index n, double tol) {
    const auto terms = expandPaths(m, n);
    Matrix sum = Matrix::Zero(n * m.d_vocab, n * m.d_vocab);
    for (const auto& term : terms) sum += term.flat_map;

    PathSumReport report;
    report.tolerance = tol;
    report.path_count = terms.size();
    report.residual = vect::relativeResidual(sum, forwardMap(m, n));
    report.pass = report.residual <= tol;
    return report;
}

Matrix virtualHead(const HeadWeights& h2, const HeadWeights& h1) {
    if (dModel(h2) != dModel(h1))
        throw DimensionError("virtualHead: d_model differs, " + std::to_string(dModel(h2)) +
                             " vs " + std::to_string(dModel(h1)));
    return ovCircuit(h2) * ovCircuit(h1);
}

namespace {

/// One layer of the residual stream as a parametric morphism. Parameter
/// layout: slot 0 scales the identity; then per head the n²·d² tensor of
/// (mixer row-major) ⊗ (OV row-major).
para::ParaMorphism layerPara(const ToyModel& m, std::size_t l, Index n) {
    const Index d = m.d_model;
    const Index nd = n * d;
    const Index per_head = n * n * d * d;
    const Index params = 1 + static_cast<Index>(m.layers[l].size()) * per_head;
    requireWithinBudget(nd, params * nd, "circuitsAsPara");
    Matrix map = Matrix::Zero(nd, params * nd);
    map.leftCols(nd) = Matrix::Identity(nd, nd);
    for (std::size_t h = 0; h < m.layers[l].size(); ++h) {
        const Index base = 1 + static_cast<Index>(h) * per_head;
        for (Index mi = 0; mi < n; ++mi)
            for (Index mj = 0; mj < n; ++mj)
                for (Index oi = 0; oi < d; ++oi)
                    for (Index oj = 0; oj < d; ++oj) {
                        const Index t = base + (mi * n + mj) * d * d + oi * d + oj;
                        map(mi * d + oi, t * nd + mj * d + oj) = 1.0;
                    }
    }
    return para::makePara(params, nd, std::move(map));
}

Vector layerTheta(const ToyModel& m, std::size_t l, Index n) {
    const Index d = m.d_model;
    const Index per_head = n * n * d * d;
    Vector theta = Vector::Zero(1 + static_cast<Index>(m.layers[l].size()) * per_head);
    theta[0] = 1.0;
    for (std::size_t h = 0; h < m.layers[l].size(); ++h) {
        const auto& ah = m.layers[l][h];
        const Matrix ov = ovCircuit(ah.head);
        const Index base = 1 + static_cast<Index>(h) * per_head;
        for (Index mi = 0; mi < n; ++mi)
            for (Index mj = 0; mj < n; ++mj)
                for (Index oi = 0; oi < d; ++oi)
                    for (Index oj = 0; oj < d; ++oj)
                        theta[base + (mi * n + mj) * d * d + oi * d + oj] =
                            ah.mixer(mi, mj) * ov(oi, oj);
    }
    return theta;
}

} // namespace

ParaCoherenceReport circuitsAsPara(const ToyModel& m, Index n, double tol) {
    requireSequenceLength(m, n);
    auto composite = para::fromLinear(embedLift(m, n));
    Vector theta = Vector::Ones(1);
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        composite = para::composePara(layerPara(m, l, n), composite);
        theta = vect::kronVec(layerTheta(m, l, n), theta);
    }
    composite = para::composePara(para::fromLinear(unembedLift(m, n)), composite);
    theta = vect::kronVec(Vector::Ones(1), theta);

    ParaCoherenceReport report;
    report.tolerance = tol;
    report.composite_param_dim = composite.param_dim;
    report.residual = vect::relativeResidual(para::flatten(composite, theta), forwardMap(m, n));
    report.pass = report.residual <= tol;
    return report;
}

Matrix attentionScores(const HeadWeights& h, const Vector& X, Index n) {
    const Index d = dModel(h);
    if (n < 1) throw DimensionError("attentionScores: n must be positive");
    if (X.size() != n * d)
        throw DimensionError("attentionScores: X has dim " + std::to_string(X.size()) +
                             ", expected n*d_model = " + std::to_string(n * d));
    Matrix q(n, dHead(h)), k(n, dHead(h));
    for (Index i = 0; i < n; ++i) {
        q.row(i) = (h.W_Q * X.segment(i * d, d)).transpose();
        k.row(i) = (h.W_K * X.segment(i * d, d)).transpose();
    }
    Matrix scores(n, n);
    for (Index dst = 0; dst < n; ++dst)
        for (Index src = 0; src < n; ++src) scores(dst, src) = q.row(dst).dot(k.row(src));
    return scores;
}

} // namespace paravect::circuits
