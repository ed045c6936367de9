#include "paravect/attention.hpp"

#include "paravect/rng.hpp"

#include <algorithm>

namespace paravect::attention {

AttnDims makeDims(Index d, Index d_k, Index d_v, Index n) {
    if (d < 1 || d_k < 1 || d_v < 1 || n < 1)
        throw DimensionError("AttnDims: all of d, d_k, d_v, n must be positive");
    AttnDims dims{d, d_k, d_v, n};
    requireWithinBudget(outputDim(dims), paramDim(dims) * inputDim(dims), "buildAtt");
    return dims;
}

Index paramDim(const AttnDims& dims) { return 2 * dims.d_k * dims.d + dims.d_v * dims.d; }
Index inputDim(const AttnDims& dims) { return dims.n * dims.d; }
Index outputDim(const AttnDims& dims) { return dims.n * (2 * dims.d_k + dims.d_v); }

namespace {

void requireParamShapes(const AttnDims& dims, const AttnParams& p) {
    if (p.W_Q.rows() != dims.d_k || p.W_Q.cols() != dims.d)
        throw DimensionError("AttnParams: W_Q is " + shapeString(p.W_Q.rows(), p.W_Q.cols()) +
                             ", expected " + shapeString(dims.d_k, dims.d));
    if (p.W_K.rows() != dims.d_k || p.W_K.cols() != dims.d)
        throw DimensionError("AttnParams: W_K is " + shapeString(p.W_K.rows(), p.W_K.cols()) +
                             ", expected " + shapeString(dims.d_k, dims.d));
    if (p.W_V.rows() != dims.d_v || p.W_V.cols() != dims.d)
        throw DimensionError("AttnParams: W_V is " + shapeString(p.W_V.rows(), p.W_V.cols()) +
                             ", expected " + shapeString(dims.d_v, dims.d));
}

void packRowMajor(const Matrix& w, Vector& theta, Index& at) {
    for (Index r = 0; r < w.rows(); ++r)
        for (Index c = 0; c < w.cols(); ++c) theta[at++] = w(r, c);
}

Matrix unpackRowMajor(const Vector& theta, Index& at, Index rows, Index cols) {
    Matrix w(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) w(r, c) = theta[at++];
    return w;
}

} // namespace

Vector packParams(const AttnDims& dims, const AttnParams& p) {
    requireParamShapes(dims, p);
    Vector theta(paramDim(dims));
    Index at = 0;
    packRowMajor(p.W_Q, theta, at);
    packRowMajor(p.W_K, theta, at);
    packRowMajor(p.W_V, theta, at);
    return theta;
}

AttnParams unpackParams(const AttnDims& dims, const Vector& theta) {
    if (theta.size() != paramDim(dims))
        throw DimensionError("unpackParams: theta has dim " + std::to_string(theta.size()) +
                             ", expected " + std::to_string(paramDim(dims)));
    AttnParams p;
    Index at = 0;
    p.W_Q = unpackRowMajor(theta, at, dims.d_k, dims.d);
    p.W_K = unpackRowMajor(theta, at, dims.d_k, dims.d);
    p.W_V = unpackRowMajor(theta, at, dims.d_v, dims.d);
    return p;
}

AttnOutput splitOutput(const AttnDims& dims, const Vector& y) {
    if (y.size() != outputDim(dims))
        throw DimensionError("splitOutput: y has dim " + std::to_string(y.size()) +
                             ", expected " + std::to_string(outputDim(dims)));
    AttnOutput out;
    out.q = y.segment(0, dims.n * dims.d_k);
    out.k = y.segment(dims.n * dims.d_k, dims.n * dims.d_k);
    out.v = y.segment(2 * dims.n * dims.d_k, dims.n * dims.d_v);
    return out;
}

para::ParaMorphism buildAtt(const AttnDims& dims) {
    const Index in = inputDim(dims);
    const Index out = outputDim(dims);
    const Index params = paramDim(dims);
    requireWithinBudget(out, params * in, "buildAtt");
    Matrix map = Matrix::Zero(out, params * in);

    // One projection block: parameter (r, c) of W feeds output channel r of
    // every token from input channel c of the same token.
    auto place = [&](Index param_offset, Index out_offset, Index w_rows) {
        for (Index r = 0; r < w_rows; ++r)
            for (Index c = 0; c < dims.d; ++c) {
                const Index t = param_offset + r * dims.d + c;
                for (Index i = 0; i < dims.n; ++i)
                    map(out_offset + i * w_rows + r, t * in + i * dims.d + c) = 1.0;
            }
    };
    place(0, 0, dims.d_k);                                          // W_Q -> q block
    place(dims.d_k * dims.d, dims.n * dims.d_k, dims.d_k);          // W_K -> k block
    place(2 * dims.d_k * dims.d, 2 * dims.n * dims.d_k, dims.d_v);  // W_V -> v block
    return para::makePara(params, in, std::move(map));
}

Matrix layerEndomapOV(const Matrix& mixer, const Matrix& ov) {
    if (mixer.rows() != mixer.cols())
        throw DimensionError("layerEndomap: mixer is " +
                             shapeString(mixer.rows(), mixer.cols()) + ", must be square");
    if (ov.rows() != ov.cols())
        throw DimensionError("layerEndomap: channel action is " +
                             shapeString(ov.rows(), ov.cols()) + ", must be square");
    return vect::kron(mixer, ov);
}

Matrix layerEndomap(const AttnDims& dims, const AttnParams& params, const Matrix& mixer,
                    const Matrix& W_O) {
    requireParamShapes(dims, params);
    if (mixer.rows() != dims.n || mixer.cols() != dims.n)
        throw DimensionError("layerEndomap: mixer is " +
                             shapeString(mixer.rows(), mixer.cols()) + ", expected " +
                             shapeString(dims.n, dims.n));
    if (W_O.rows() != dims.d || W_O.cols() != dims.d_v)
        throw DimensionError("layerEndomap: W_O is " + shapeString(W_O.rows(), W_O.cols()) +
                             ", expected " + shapeString(dims.d, dims.d_v));
    return layerEndomapOV(mixer, W_O * params.W_V);
}

Matrix outputAdapter(const AttnDims& dims, const Matrix& mixer, const Matrix& W_O) {
    if (mixer.rows() != dims.n || mixer.cols() != dims.n)
        throw DimensionError("outputAdapter: mixer is " +
                             shapeString(mixer.rows(), mixer.cols()) + ", expected " +
                             shapeString(dims.n, dims.n));
    if (W_O.rows() != dims.d || W_O.cols() != dims.d_v)
        throw DimensionError("outputAdapter: W_O is " + shapeString(W_O.rows(), W_O.cols()) +
                             ", expected " + shapeString(dims.d, dims.d_v));
    Matrix adapter = Matrix::Zero(dims.n * dims.d, outputDim(dims));
    adapter.rightCols(dims.n * dims.d_v) = vect::kron(mixer, W_O);
    return adapter;
}

FunctorLawReport checkFunctorLaws(const AttnDims& dims, const AttnParams& params, int trials,
                                  std::uint64_t seed, double tol) {
    const auto att = buildAtt(dims);
    const Index in = inputDim(dims);
    const Matrix id_p = Matrix::Identity(att.param_dim, att.param_dim);
    const Vector theta = packParams(dims, params);

    FunctorLawReport report;
    report.tolerance = tol;
    report.trials = trials;

    // Identity preservation: tensoring with id_X changes nothing.
    report.identity_residual =
        (att.map * vect::kron(id_p, Matrix::Identity(in, in)) - att.map)
            .cwiseAbs()
            .maxCoeff();

    Rng rng(seed, "attention.functor_laws");
    const Matrix id_n = Matrix::Identity(dims.n, dims.n);
    for (int t = 0; t < trials; ++t) {
        const Matrix f = vect::kron(id_n, rng.matrix(dims.d, dims.d));
        const Matrix g = vect::kron(id_n, rng.matrix(dims.d, dims.d));

        const Matrix joint = vect::kron(id_p, Matrix(g * f));
        const Matrix split = vect::kron(id_p, g) * vect::kron(id_p, f);
        report.composition_residual =
            std::max(report.composition_residual, (joint - split).cwiseAbs().maxCoeff());

        // Naturality at fixed params: precomposing the bilinear map with
        // id ⊗ f, then flattening, equals flatten(att,θ)·f.
        const Matrix precomposed =
            para::flatten(para::makePara(att.param_dim, in, att.map * vect::kron(id_p, f)),
                          theta);
        const Matrix direct = para::flatten(att, theta) * f;
        report.naturality_residual = std::max(
            report.naturality_residual, vect::relativeResidual(precomposed, direct));
    }
    report.pass = report.identity_residual <= tol && report.composition_residual <= tol &&
                  report.naturality_residual <= tol;
    return report;
}

ResidualReport checkCompositionStability(const AttnDims& dims, int trials, std::uint64_t seed,
                                         double tol) {
    Rng rng(seed, "attention.composition_stability");
    ResidualReport report;
    report.tolerance = tol;
    const auto att = buildAtt(dims);
    for (int t = 0; t < trials; ++t) {
        const Vector theta1 = rng.vector(att.param_dim);
        const Vector theta2 = rng.vector(att.param_dim);
        const Matrix mixer = rng.matrix(dims.n, dims.n);
        const Matrix W_O = rng.matrix(dims.d, dims.d_v);
        const Matrix adapter = outputAdapter(dims, mixer, W_O);

        const auto stacked =
            para::composePara(att, para::composePara(para::fromLinear(adapter), att));
        Vector theta = vect::kronVec(theta2, Vector::Ones(1));
        theta = vect::kronVec(theta, theta1);

        const Matrix whole = para::flatten(stacked, theta);
        const Matrix factored =
            para::flatten(att, theta2) * adapter * para::flatten(att, theta1);
        report.residual =
            std::max(report.residual, vect::relativeResidual(whole, factored));
    }
    report.pass = report.residual <= tol;
    return report;
}

ResidualReport checkEndomapProduct(const AttnDims& dims, int trials, std::uint64_t seed,
                                   double tol) {
    Rng rng(seed, "attention.endomap_product");
    ResidualReport report;
    report.tolerance = tol;
    for (int t = 0; t < trials; ++t) {
        const Matrix m1 = rng.matrix(dims.n, dims.n);
        const Matrix m2 = rng.matrix(dims.n, dims.n);
        const Matrix ov1 = rng.matrix(dims.d, dims.d);
        const Matrix ov2 = rng.matrix(dims.d, dims.d);
        const Matrix composed = layerEndomapOV(m1, ov1) * layerEndomapOV(m2, ov2);
        const Matrix direct = layerEndomapOV(Matrix(m1 * m2), Matrix(ov1 * ov2));
        report.residual =
            std::max(report.residual, vect::relativeResidual(composed, direct));
    }
    report.pass = report.residual <= tol;
    return report;
}

} // namespace paravect::attention
