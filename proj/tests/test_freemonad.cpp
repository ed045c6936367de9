#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "paravect/freemonad.hpp"
#include "paravect/rng.hpp"

using namespace paravect;
using freemonad::GradedSpace;
using freemonad::GradedVector;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

GradedVector randomGraded(const GradedSpace& space, Rng& rng) {
    auto gv = freemonad::zero(space);
    for (auto& b : gv.blocks) b = rng.vector(b.size());
    return gv;
}

double maxAbsDiff(const GradedVector& a, const GradedVector& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.blocks.size(); ++k)
        if (a.blocks[k].size() > 0)
            m = std::max(m, (a.blocks[k] - b.blocks[k]).cwiseAbs().maxCoeff());
    return m;
}

} // namespace

TEST_CASE("GradedSpace: grade dims follow a^k * x") {
    const auto space = GradedSpace::make(3, 2, 3);
    CHECK(space.grade_dims == std::vector<Index>{3, 6, 12, 24});
    CHECK(space.total == 45);
    CHECK(space.offsets == std::vector<Index>{0, 3, 9, 21});
}

TEST_CASE("unit: zero input, depth zero, and block population") {
    const auto space = GradedSpace::make(3, 2, 3);
    const auto z = freemonad::unit(space, Vector::Zero(3));
    CHECK(z.flat().norm() == 0.0);

    const auto single = GradedSpace::make(3, 2, 0);
    const auto u0 = freemonad::unit(single, vec({1, 2, 3}));
    CHECK(u0.blocks.size() == 1);
    CHECK(u0.blocks[0] == vec({1, 2, 3}));

    Rng rng(1, "unit");
    const Vector x = rng.vector(3);
    const auto u = freemonad::unit(space, x);
    CHECK(u.blocks[0] == x);
    for (std::size_t k = 1; k < u.blocks.size(); ++k) CHECK(u.blocks[k].norm() == 0.0);
}

TEST_CASE("mult: left and right unit laws, exact") {
    Rng rng(2, "units");
    for (Index depth : {0, 1, 2, 3}) {
        const auto space = GradedSpace::make(2, 2, depth);
        for (int t = 0; t < 25; ++t) {
            const auto v = randomGraded(space, rng);
            CHECK(maxAbsDiff(freemonad::mult(space, freemonad::unitOuter(space, v)), v) == 0.0);
            CHECK(maxAbsDiff(freemonad::mult(space, freemonad::leafUnit(space, v)), v) == 0.0);
        }
    }
}

TEST_CASE("mult: explicit (outer 1, inner 1) component lands in grade 2 unchanged") {
    // a=2, x=1, N=2: T(X) has grades of dim (1,2,4), total 7.
    const auto space = GradedSpace::make(1, 2, 2);
    const auto nest = freemonad::nested(space);
    auto probe = freemonad::zero(nest);
    // Outer grade 1 has 2 slots of leaf dim 7; put content in the inner
    // grade-1 block (leaf offsets 1..2) of both slots.
    probe.blocks[1].setZero();
    probe.blocks[1][0 * 7 + 1] = 5.0; // slot 0, inner grade 1, coord 0
    probe.blocks[1][0 * 7 + 2] = 6.0;
    probe.blocks[1][1 * 7 + 1] = 7.0; // slot 1
    probe.blocks[1][1 * 7 + 2] = 8.0;
    const auto merged = freemonad::mult(space, probe);
    CHECK(merged.blocks[0].norm() == 0.0);
    CHECK(merged.blocks[1].norm() == 0.0);
    CHECK(merged.blocks[2] == vec({5, 6, 7, 8}));
}

TEST_CASE("mult: components beyond the depth are dropped") {
    const auto space = GradedSpace::make(1, 2, 1); // grades (1, 2), total 3
    const auto nest = freemonad::nested(space);
    auto probe = freemonad::zero(nest);
    probe.blocks[1][0 * 3 + 1] = 1.0; // outer 1, inner 1 -> grade 2 > N
    probe.blocks[1][1 * 3 + 2] = 2.0;
    const auto merged = freemonad::mult(space, probe);
    CHECK(merged.flat().norm() == 0.0);
}

TEST_CASE("mult rejects a vector over the wrong space") {
    const auto space = GradedSpace::make(2, 2, 2);
    const auto other = GradedSpace::make(3, 2, 2);
    CHECK_THROWS_AS(freemonad::mult(space, freemonad::zero(other)), DimensionError);
}

TEST_CASE("iterateLayer: zero iterations, identity, scalar powers") {
    const Vector x = vec({1, 2});
    CHECK(freemonad::iterateLayer(Matrix::Identity(2, 2), x, 0) == x);
    CHECK(freemonad::iterateLayer(Matrix::Identity(2, 2), x, 7) == x);

    Matrix doubling(1, 1);
    doubling << 2;
    CHECK(freemonad::iterateLayer(doubling, vec({1}), 5) == vec({32}));
}

TEST_CASE("checkMonadLaws: trivial at depth 0, exact at the spec dims") {
    const auto trivial = freemonad::checkMonadLaws(GradedSpace::make(2, 2, 0), 10, 3);
    CHECK(trivial.pass);

    const auto report = freemonad::checkMonadLaws(GradedSpace::make(2, 2, 3), 50, 4);
    CHECK(report.pass);
    CHECK(report.unit_left == 0.0);
    CHECK(report.unit_right == 0.0);
    CHECK(report.assoc == 0.0);
}

TEST_CASE("regression: mis-ordered nesting layout breaks the laws") {
    // Pack the leaf's grade blocks back-to-front and the right unit law
    // must fail: the bookkeeping is what the laws certify.
    const auto space = GradedSpace::make(1, 2, 2);
    Rng rng(5, "corrupt");
    const auto v = randomGraded(space, rng);

    auto corrupted = freemonad::zero(freemonad::nested(space));
    Index slots = 1;
    for (Index j = 0; j <= space.depth; ++j) {
        for (Index p = 0; p < slots; ++p) {
            // Correct T(eta) writes the slot at leaf offset 0 (grade 0);
            // write it at the tail block instead.
            const Index wrong_offset = space.offsets.back();
            corrupted.blocks[static_cast<std::size_t>(j)][p * space.total + wrong_offset] =
                v.blocks[static_cast<std::size_t>(j)][p];
        }
        slots *= space.a_dim;
    }
    const auto merged = freemonad::mult(space, corrupted);
    CHECK(maxAbsDiff(merged, v) > 0.1);

    // A μ that disagrees on the nesting convention — reading each leaf's
    // grade blocks back-to-front — must fail associativity against the real
    // μ. (Consistently scrambling the *data* would not do: the law holds for
    // every input; only a layout-inconsistent reader can break it.)
    const auto nest = freemonad::nested(space);
    const auto nest2 = freemonad::nested(nest);
    auto t3 = freemonad::zero(nest2);
    for (auto& b : t3.blocks) b = rng.intVector(b.size());

    auto corruptMult = [&](const GradedVector& outer) {
        auto out = freemonad::zero(space);
        Index slots = 1;
        for (Index j = 0; j <= space.depth; ++j) {
            const Vector& oblock = outer.blocks[static_cast<std::size_t>(j)];
            for (Index k = 0; j + k <= space.depth; ++k) {
                const Index len = space.grade_dims[static_cast<std::size_t>(k)];
                // wrong convention: grade blocks assumed reversed in leaves
                const Index off =
                    space.total - space.offsets[static_cast<std::size_t>(k)] - len;
                for (Index p = 0; p < slots; ++p)
                    out.blocks[static_cast<std::size_t>(j + k)].segment(p * len, len) +=
                        oblock.segment(p * space.total + off, len);
            }
            slots *= space.a_dim;
        }
        return out;
    };

    const auto via_outer = freemonad::mult(space, freemonad::mult(nest, t3));
    const auto via_corrupt_leaves = freemonad::mult(
        space, freemonad::mapLeaves(t3, nest.total, space.total,
                                    [&](const Vector& leaf) {
                                        return corruptMult(freemonad::fromFlat(nest, leaf))
                                            .flat();
                                    }));
    CHECK(maxAbsDiff(via_outer, via_corrupt_leaves) > 0.0);
}

TEST_CASE("grade additivity holds exhaustively at small dims") {
    for (Index a : {1, 2, 3})
        for (Index x : {1, 2})
            for (Index depth : {0, 1, 2}) {
                const auto report =
                    freemonad::checkGradeAdditivity(GradedSpace::make(x, a, depth));
                CHECK(report.pass);
            }
}

TEST_CASE("truncation monotonicity: deeper results restrict exactly") {
    Rng rng(6, "trunc");
    const auto shallow = GradedSpace::make(2, 2, 2);
    const auto deep = GradedSpace::make(2, 2, 3);
    const auto nest_shallow = freemonad::nested(shallow);
    const auto nest_deep = freemonad::nested(deep);

    for (int t = 0; t < 20; ++t) {
        // Same content, embedded in both nesting depths: deep copy carries
        // the shallow blocks and zeros elsewhere.
        auto small = randomGraded(nest_shallow, rng);
        auto large = freemonad::zero(nest_deep);
        Index slots = 1;
        for (Index j = 0; j <= shallow.depth; ++j) {
            for (Index p = 0; p < slots; ++p)
                for (Index k = 0; k <= shallow.depth; ++k)
                    large.blocks[static_cast<std::size_t>(j)].segment(
                        p * deep.total + deep.offsets[static_cast<std::size_t>(k)],
                        shallow.grade_dims[static_cast<std::size_t>(k)]) =
                        small.blocks[static_cast<std::size_t>(j)].segment(
                            p * shallow.total +
                                shallow.offsets[static_cast<std::size_t>(k)],
                            shallow.grade_dims[static_cast<std::size_t>(k)]);
            slots *= shallow.a_dim;
        }
        const auto merged_small = freemonad::mult(shallow, small);
        const auto merged_large = freemonad::mult(deep, large);
        for (Index k = 0; k <= shallow.depth; ++k)
            CHECK((merged_small.blocks[static_cast<std::size_t>(k)] -
                   merged_large.blocks[static_cast<std::size_t>(k)])
                      .norm() == 0.0);
    }
}

TEST_CASE("algebraCollapse weights slots by digit products") {
    // a=2, x=1, N=2 with algebra (2, 3): grade-2 slot (i,j) weighs 2^(#0s)*3^(#1s)
    const auto space = GradedSpace::make(1, 2, 2);
    auto gv = freemonad::zero(space);
    gv.blocks[0] = vec({1});
    gv.blocks[1] = vec({1, 1});
    gv.blocks[2] = vec({1, 1, 1, 1});
    const Vector out = freemonad::algebraCollapse(space, vec({2, 3}), gv);
    // 1 + (2 + 3) + (4 + 6 + 6 + 9)
    CHECK(out == vec({31}));
}

TEST_CASE("identity-monad factorization holds within 1e-11") {
    const auto report = freemonad::checkFactorization(GradedSpace::make(2, 2, 3), 50, 8);
    CHECK(report.pass);
    CHECK(report.unit_residual <= 1e-11);
    CHECK(report.mult_residual <= 1e-11);
}

TEST_CASE("LinearEndofunctor maps objects and morphisms consistently") {
    const freemonad::LinearEndofunctor F{3};
    CHECK(F.onObject(4) == 12);
    Rng rng(9, "endo");
    const Matrix f = rng.matrix(2, 4);
    const Matrix g = rng.matrix(4, 3);
    const Matrix joint = F.onMap(f * g);
    const Matrix split = F.onMap(f) * F.onMap(g);
    CHECK(vect::relativeResidual(joint, split) <= 1e-13);
    CHECK((F.onMap(Matrix::Identity(4, 4)) - Matrix::Identity(12, 12)).norm() == 0.0);
}
