#include "paravect/para.hpp"

namespace paravect::para {

ParaMorphism makePara(Index param_dim, Index in_dim, Matrix map) {
    if (param_dim < 0 || in_dim < 0)
        throw DimensionError("ParaMorphism: negative dimension");
    if (map.cols() != param_dim * in_dim)
        throw DimensionError("ParaMorphism: map is " + shapeString(map.rows(), map.cols()) +
                             " but param_dim*in_dim is " + std::to_string(param_dim * in_dim));
    ParaMorphism m;
    m.param_dim = param_dim;
    m.in_dim = in_dim;
    m.out_dim = map.rows();
    m.map = std::move(map);
    return m;
}

ParaMorphism identityPara(Index dim) { return makePara(1, dim, Matrix::Identity(dim, dim)); }

ParaMorphism matrixPara(Index out_dim, Index in_dim) {
    requireWithinBudget(out_dim, out_dim * in_dim * in_dim, "matrixPara");
    Matrix map = Matrix::Zero(out_dim, out_dim * in_dim * in_dim);
    // Parameter (r, c), row-major, paired with input coordinate c feeds
    // output coordinate r.
    for (Index r = 0; r < out_dim; ++r)
        for (Index c = 0; c < in_dim; ++c) map(r, (r * in_dim + c) * in_dim + c) = 1.0;
    return makePara(out_dim * in_dim, in_dim, std::move(map));
}

ParaMorphism fromLinear(const Matrix& f) { return makePara(1, f.cols(), f); }

Vector evaluate(const ParaMorphism& m, const Vector& theta, const Vector& x) {
    if (theta.size() != m.param_dim)
        throw DimensionError("evaluate: theta has dim " + std::to_string(theta.size()) +
                             ", morphism expects param_dim " + std::to_string(m.param_dim));
    if (x.size() != m.in_dim)
        throw DimensionError("evaluate: x has dim " + std::to_string(x.size()) +
                             ", morphism expects in_dim " + std::to_string(m.in_dim));
    return m.map * vect::kronVec(theta, x);
}

ParaMorphism composePara(const ParaMorphism& g, const ParaMorphism& f) {
    if (f.out_dim != g.in_dim)
        throw DimensionError("composePara: inner dimensions differ, f.out_dim=" +
                             std::to_string(f.out_dim) + " vs g.in_dim=" +
                             std::to_string(g.in_dim));
    requireWithinBudget(g.out_dim, g.param_dim * f.param_dim * f.in_dim, "composePara");
    // (θ_g ⊗ θ_f) ⊗ x rebrackets to θ_g ⊗ (θ_f ⊗ x) for free, so the
    // composite is g.map ∘ (I_Q ⊗ f.map). That product is block structured:
    // the slice for g-parameter q is g.map's q-th column block times f.map.
    // Computing it slice by slice avoids materializing I_Q ⊗ f.map, whose
    // size is quadratic in g.param_dim.
    Matrix h(g.out_dim, g.param_dim * f.param_dim * f.in_dim);
    const Index f_cols = f.param_dim * f.in_dim;
    for (Index q = 0; q < g.param_dim; ++q)
        h.middleCols(q * f_cols, f_cols) = g.map.middleCols(q * g.in_dim, g.in_dim) * f.map;
    return makePara(g.param_dim * f.param_dim, f.in_dim, std::move(h));
}

Matrix flatten(const ParaMorphism& m, const Vector& theta) {
    if (theta.size() != m.param_dim)
        throw DimensionError("flatten: theta has dim " + std::to_string(theta.size()) +
                             ", morphism expects param_dim " + std::to_string(m.param_dim));
    Matrix out = Matrix::Zero(m.out_dim, m.in_dim);
    for (Index k = 0; k < m.param_dim; ++k)
        out += theta[k] * m.map.middleCols(k * m.in_dim, m.in_dim);
    return out;
}

Reparam makeReparam(ParaMorphism source, ParaMorphism target, Matrix rho) {
    if (source.in_dim != target.in_dim || source.out_dim != target.out_dim)
        throw DimensionError("Reparam: source is " +
                             shapeString(source.out_dim, source.in_dim) + " but target is " +
                             shapeString(target.out_dim, target.in_dim));
    if (rho.rows() != source.param_dim || rho.cols() != target.param_dim)
        throw DimensionError("Reparam: rho is " + shapeString(rho.rows(), rho.cols()) +
                             ", expected " + shapeString(source.param_dim, target.param_dim));
    Reparam r;
    r.source = std::move(source);
    r.target = std::move(target);
    r.rho = std::move(rho);
    r.construction_residual = checkReparam(r).residual;
    return r;
}

SquareReport checkReparam(const Reparam& r, double tol) {
    const Index in = r.source.in_dim;
    const Matrix reparam_side =
        r.source.map * vect::kron(r.rho, Matrix::Identity(in, in));
    SquareReport report;
    report.tolerance = tol;
    // Normalized against ‖g‖, the target side of the square.
    report.residual = (r.target.map - reparam_side).norm() / std::max(1.0, r.target.map.norm());
    report.pass = report.residual <= tol;
    return report;
}

Reparam verticalCompose(const Reparam& r2, const Reparam& r1) {
    return makeReparam(r1.source, r2.target, r1.rho * r2.rho);
}

Reparam horizontalCompose(const Reparam& rg, const Reparam& rf) {
    return makeReparam(composePara(rg.source, rf.source), composePara(rg.target, rf.target),
                       vect::kron(rg.rho, rf.rho));
}

} // namespace paravect::para
