#include "paravect/freemonad.hpp"

#include "paravect/rng.hpp"

#include <algorithm>
#include <cmath>

namespace paravect::freemonad {

GradedSpace GradedSpace::make(Index x_dim, Index a_dim, Index depth) {
    if (x_dim < 1) throw DimensionError("GradedSpace: x_dim must be positive");
    if (a_dim < 1) throw DimensionError("GradedSpace: a_dim must be positive");
    if (depth < 0) throw DimensionError("GradedSpace: depth must be nonnegative");
    GradedSpace s;
    s.x_dim = x_dim;
    s.a_dim = a_dim;
    s.depth = depth;
    Index dim = x_dim;
    for (Index k = 0; k <= depth; ++k) {
        s.offsets.push_back(s.total);
        s.grade_dims.push_back(dim);
        s.total += dim;
        requireWithinBudget(s.total, 1, "GradedSpace");
        dim *= a_dim;
    }
    return s;
}

Vector GradedVector::flat() const {
    Vector v(space.total);
    for (Index k = 0; k <= space.depth; ++k)
        v.segment(space.offsets[static_cast<std::size_t>(k)],
                  space.grade_dims[static_cast<std::size_t>(k)]) =
            blocks[static_cast<std::size_t>(k)];
    return v;
}

GradedVector zero(const GradedSpace& space) {
    GradedVector gv;
    gv.space = space;
    for (Index k = 0; k <= space.depth; ++k)
        gv.blocks.push_back(Vector::Zero(space.grade_dims[static_cast<std::size_t>(k)]));
    return gv;
}

GradedVector fromFlat(const GradedSpace& space, const Vector& v) {
    if (v.size() != space.total)
        throw DimensionError("GradedVector: flat vector has dim " + std::to_string(v.size()) +
                             ", space total is " + std::to_string(space.total));
    GradedVector gv;
    gv.space = space;
    for (Index k = 0; k <= space.depth; ++k)
        gv.blocks.push_back(v.segment(space.offsets[static_cast<std::size_t>(k)],
                                      space.grade_dims[static_cast<std::size_t>(k)]));
    return gv;
}

GradedVector unit(const GradedSpace& space, const Vector& x) {
    if (x.size() != space.x_dim)
        throw DimensionError("unit: x has dim " + std::to_string(x.size()) +
                             ", space base is " + std::to_string(space.x_dim));
    GradedVector gv = zero(space);
    gv.blocks[0] = x;
    return gv;
}

GradedSpace nested(const GradedSpace& space) {
    return GradedSpace::make(space.total, space.a_dim, space.depth);
}

GradedVector mult(const GradedSpace& space, const GradedVector& outer) {
    const GradedSpace nest = nested(space);
    if (!outer.space.sameShape(nest))
        throw DimensionError("mult: input is not laid out as T(T(X)) for this space "
                             "(outer-grade-major over leaves of dim " +
                             std::to_string(space.total) + ")");
    const Index leaf = space.total;
    GradedVector out = zero(space);
    Index slots = 1; // a_dim^j
    for (Index j = 0; j <= space.depth; ++j) {
        const Vector& oblock = outer.blocks[static_cast<std::size_t>(j)];
        for (Index k = 0; j + k <= space.depth; ++k) {
            const Index len = space.grade_dims[static_cast<std::size_t>(k)];
            const Index off = space.offsets[static_cast<std::size_t>(k)];
            Vector& target = out.blocks[static_cast<std::size_t>(j + k)];
            // A^j ⊗ (A^k ⊗ X) and A^(j+k) ⊗ X index identically: slot p of
            // the outer grade lands at p*len in the merged grade.
            for (Index p = 0; p < slots; ++p)
                target.segment(p * len, len) += oblock.segment(p * leaf + off, len);
        }
        slots *= space.a_dim;
    }
    return out;
}

GradedVector unitOuter(const GradedSpace& space, const GradedVector& t) {
    if (!t.space.sameShape(space))
        throw DimensionError("unitOuter: argument lives over a different graded space");
    return unit(nested(space), t.flat());
}

GradedVector leafUnit(const GradedSpace& space, const GradedVector& t) {
    if (!t.space.sameShape(space))
        throw DimensionError("leafUnit: argument lives over a different graded space");
    return mapLeaves(t, space.x_dim, space.total,
                     [&](const Vector& x) { return unit(space, x).flat(); });
}

GradedVector mapLeaves(const GradedVector& gv, Index leaf_in, Index leaf_out,
                       const std::function<Vector(const Vector&)>& f) {
    if (gv.space.x_dim != leaf_in)
        throw DimensionError("mapLeaves: leaves have dim " + std::to_string(gv.space.x_dim) +
                             ", expected " + std::to_string(leaf_in));
    GradedVector out = zero(GradedSpace::make(leaf_out, gv.space.a_dim, gv.space.depth));
    Index slots = 1;
    for (Index j = 0; j <= gv.space.depth; ++j) {
        const Vector& src = gv.blocks[static_cast<std::size_t>(j)];
        Vector& dst = out.blocks[static_cast<std::size_t>(j)];
        for (Index p = 0; p < slots; ++p)
            dst.segment(p * leaf_out, leaf_out) = f(src.segment(p * leaf_in, leaf_in));
        slots *= gv.space.a_dim;
    }
    return out;
}

Vector iterateLayer(const Matrix& layer, Vector x, Index k) {
    if (layer.rows() != layer.cols())
        throw DimensionError("iterateLayer: layer is " +
                             shapeString(layer.rows(), layer.cols()) + ", must be square");
    if (x.size() != layer.cols())
        throw DimensionError("iterateLayer: x has dim " + std::to_string(x.size()) +
                             ", layer expects " + std::to_string(layer.cols()));
    for (Index i = 0; i < k; ++i) x = layer * x;
    return x;
}

namespace {

GradedVector randomGraded(const GradedSpace& space, Rng& rng) {
    GradedVector gv = zero(space);
    for (auto& b : gv.blocks) b = rng.vector(b.size());
    return gv;
}

GradedVector randomGradedInt(const GradedSpace& space, Rng& rng) {
    GradedVector gv = zero(space);
    for (auto& b : gv.blocks) b = rng.intVector(b.size());
    return gv;
}

double maxAbsDiff(const GradedVector& a, const GradedVector& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.blocks.size(); ++k) {
        if (a.blocks[k].size() == 0) continue;
        m = std::max(m, (a.blocks[k] - b.blocks[k]).cwiseAbs().maxCoeff());
    }
    return m;
}

} // namespace

MonadLawReport checkMonadLaws(const GradedSpace& space, int trials, std::uint64_t seed) {
    Rng rng(seed, "freemonad.monad_laws");
    MonadLawReport report;
    report.trials = trials;
    const GradedSpace nest = nested(space);
    for (int t = 0; t < trials; ++t) {
        const GradedVector v = randomGraded(space, rng);
        report.unit_left =
            std::max(report.unit_left, maxAbsDiff(mult(space, unitOuter(space, v)), v));
        report.unit_right =
            std::max(report.unit_right, maxAbsDiff(mult(space, leafUnit(space, v)), v));

        // The two association orders accumulate the same contributions in a
        // different sequence; on integer-valued probes every partial sum is
        // exact, so the comparison can demand bit equality.
        const GradedVector t3 = randomGradedInt(nested(nest), rng);
        const GradedVector via_outer = mult(space, mult(nest, t3));
        const GradedVector via_leaves = mult(
            space, mapLeaves(t3, nest.total, space.total,
                             [&](const Vector& leaf) {
                                 return mult(space, fromFlat(nest, leaf)).flat();
                             }));
        report.assoc = std::max(report.assoc, maxAbsDiff(via_outer, via_leaves));
    }
    report.pass = report.unit_left == 0.0 && report.unit_right == 0.0 && report.assoc == 0.0;
    return report;
}

Vector algebraCollapse(const GradedSpace& space, const Vector& algebra,
                       const GradedVector& gv) {
    if (algebra.size() != space.a_dim)
        throw DimensionError("algebraCollapse: algebra map has dim " +
                             std::to_string(algebra.size()) + ", expected " +
                             std::to_string(space.a_dim));
    if (!gv.space.sameShape(space))
        throw DimensionError("algebraCollapse: argument lives over a different graded space");
    Vector out = Vector::Zero(space.x_dim);
    Index slots = 1;
    for (Index k = 0; k <= space.depth; ++k) {
        const Vector& block = gv.blocks[static_cast<std::size_t>(k)];
        for (Index p = 0; p < slots; ++p) {
            // weight = product of algebra at the base-a digits of p, outer
            // digit first (the A^{⊗k} slot index).
            double w = 1.0;
            Index rest = p;
            for (Index i = 0; i < k; ++i) {
                const Index digit = rest % space.a_dim;
                rest /= space.a_dim;
                w *= algebra[digit];
            }
            out += w * block.segment(p * space.x_dim, space.x_dim);
        }
        slots *= space.a_dim;
    }
    return out;
}

GradedVector truncateNested(const GradedSpace& space, GradedVector outer) {
    const GradedSpace nest = nested(space);
    if (!outer.space.sameShape(nest))
        throw DimensionError("truncateNested: input is not laid out as T(T(X))");
    Index slots = 1;
    for (Index j = 0; j <= space.depth; ++j) {
        Vector& block = outer.blocks[static_cast<std::size_t>(j)];
        const Index keep = space.offsets[static_cast<std::size_t>(space.depth - j)] +
                           space.grade_dims[static_cast<std::size_t>(space.depth - j)];
        for (Index p = 0; p < slots; ++p)
            block.segment(p * space.total + keep, space.total - keep).setZero();
        slots *= space.a_dim;
    }
    return outer;
}

ResidualReport checkGradeAdditivity(const GradedSpace& space) {
    const GradedSpace nest = nested(space);
    ResidualReport report;
    report.tolerance = 0.0;
    GradedVector probe = zero(nest);
    Index slots = 1;
    for (Index j = 0; j <= space.depth; ++j) {
        Vector& jblock = probe.blocks[static_cast<std::size_t>(j)];
        for (Index p = 0; p < slots; ++p)
            for (Index c = 0; c < space.total; ++c) {
                // Leaf coordinate c sits in inner grade k at offset r.
                Index k = space.depth;
                while (space.offsets[static_cast<std::size_t>(k)] > c) --k;
                const Index r = c - space.offsets[static_cast<std::size_t>(k)];

                jblock[p * space.total + c] = 1.0;
                const GradedVector got = mult(space, probe);
                jblock[p * space.total + c] = 0.0;

                // The image must be the single predicted coordinate (or
                // nothing, when the merged grade exceeds the depth).
                for (Index g = 0; g <= space.depth; ++g) {
                    const Vector& block = got.blocks[static_cast<std::size_t>(g)];
                    const bool is_target = j + k <= space.depth && g == j + k;
                    const Index hot =
                        is_target ? p * space.grade_dims[static_cast<std::size_t>(k)] + r : -1;
                    for (Index i = 0; i < block.size(); ++i) {
                        const double want = i == hot ? 1.0 : 0.0;
                        report.residual = std::max(report.residual, std::abs(block[i] - want));
                    }
                }
            }
        slots *= space.a_dim;
    }
    report.pass = report.residual == 0.0;
    return report;
}

FactorizationReport checkFactorization(const GradedSpace& space, int trials,
                                       std::uint64_t seed, double tol) {
    Rng rng(seed, "freemonad.factorization");
    FactorizationReport report;
    report.trials = trials;
    report.tolerance = tol;
    const GradedSpace nest = nested(space);
    for (int t = 0; t < trials; ++t) {
        const Vector algebra = rng.vector(space.a_dim);
        auto collapse = [&](const GradedVector& gv) {
            return algebraCollapse(space, algebra, gv);
        };

        const Vector x = rng.vector(space.x_dim);
        const double unit_diff =
            x.size() == 0 ? 0.0 : (collapse(unit(space, x)) - x).cwiseAbs().maxCoeff();
        report.unit_residual = std::max(report.unit_residual, unit_diff);

        // Beyond total grade N the truncated μ drops what the untruncated
        // collapse keeps, so the morphism law is checked on the grade ≤ N
        // part only.
        const GradedVector t2 = truncateNested(space, randomGraded(nest, rng));
        const Vector lhs = collapse(mult(space, t2));
        const Vector rhs = collapse(mapLeaves(t2, space.total, space.x_dim,
                                              [&](const Vector& leaf) {
                                                  return collapse(fromFlat(space, leaf));
                                              }));
        const double scale = std::max(1.0, rhs.norm());
        report.mult_residual = std::max(report.mult_residual, (lhs - rhs).norm() / scale);
    }
    report.pass = report.unit_residual <= tol && report.mult_residual <= tol;
    return report;
}

} // namespace paravect::freemonad
