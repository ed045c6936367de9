#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "paravect/circuits.hpp"
#include "paravect/lawcheck.hpp"
#include "paravect/rng.hpp"
#include "support/oracles.hpp"

using namespace paravect;
using circuits::HeadWeights;
using circuits::ToyModel;

namespace {

HeadWeights randomHead(Index d_head, Index d_model, Rng& rng) {
    return circuits::makeHead(rng.matrix(d_head, d_model), rng.matrix(d_head, d_model),
                              rng.matrix(d_head, d_model), rng.matrix(d_model, d_head));
}

// Gram-Schmidt rows, independent of any library QR.
Matrix orthonormalRows(Index rows, Index cols, Rng& rng) {
    Matrix m = rng.matrix(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < i; ++j) m.row(i) -= m.row(i).dot(m.row(j)) * m.row(j);
        m.row(i) /= m.row(i).norm();
    }
    return m;
}

} // namespace

TEST_CASE("qkCircuit: identity slice, rank-one case, transpose-multiply oracle") {
    const Index d = 3;
    HeadWeights full = circuits::makeHead(Matrix::Identity(d, d), Matrix::Identity(d, d),
                                          Matrix::Identity(d, d), Matrix::Identity(d, d));
    CHECK((circuits::qkCircuit(full) - Matrix::Identity(d, d)).norm() == 0.0);

    Rng rng(21, "qk");
    const auto thin = randomHead(1, 4, rng);
    CHECK(vect::numericalRank(circuits::qkCircuit(thin)) == 1);

    const auto head = randomHead(2, 4, rng);
    const Matrix got = circuits::qkCircuit(head);
    const Matrix want = oracles::naiveMatmul(Matrix(head.W_Q.transpose()), head.W_K);
    CHECK(vect::relativeResidual(got, want) <= 1e-14);
    CHECK(vect::numericalRank(got) <= 2);
}

TEST_CASE("ovCircuit: zero values, multiply oracle, projection construction") {
    Rng rng(22, "ov");
    auto head = randomHead(2, 4, rng);
    head.W_V.setZero();
    CHECK(circuits::ovCircuit(head).norm() == 0.0);

    const auto random_head = randomHead(3, 5, rng);
    CHECK(vect::relativeResidual(circuits::ovCircuit(random_head),
                                 oracles::naiveMatmul(random_head.W_O, random_head.W_V)) <=
          1e-14);

    // W_V with orthonormal rows and W_O its transpose: OV is a rank-d_head
    // orthogonal projection, so it is idempotent.
    const Matrix v = orthonormalRows(2, 5, rng);
    const auto proj_head =
        circuits::makeHead(rng.matrix(2, 5), rng.matrix(2, 5), v, Matrix(v.transpose()));
    const Matrix ov = circuits::ovCircuit(proj_head);
    CHECK(vect::numericalRank(ov) == 2);
    CHECK(vect::relativeResidual(Matrix(ov * ov), ov) <= 1e-12);
}

TEST_CASE("headContribution: zero mixer, identity mixer, kron oracle") {
    Rng rng(23, "contrib");
    const auto head = randomHead(2, 3, rng);
    CHECK(circuits::headContribution(head, Matrix::Zero(4, 4)).norm() == 0.0);

    const Matrix block_diag = circuits::headContribution(head, Matrix::Identity(2, 2));
    const Matrix ov = circuits::ovCircuit(head);
    CHECK((block_diag.block(0, 0, 3, 3) - ov).norm() == 0.0);
    CHECK(block_diag.block(0, 3, 3, 3).norm() == 0.0);

    const Matrix mixer = rng.matrix(3, 3);
    CHECK(vect::relativeResidual(circuits::headContribution(head, mixer),
                                 oracles::kronOracle(mixer, ov)) <= 1e-14);
}

TEST_CASE("expandPaths: zero layers gives the single direct route") {
    Rng rng(1, "paths0");
    auto model = lawcheck::randomToyModel(0, 0, 3, 4, 2, 2, rng);
    const auto terms = circuits::expandPaths(model, 2);
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].heads.empty());
    const Matrix expected = vect::kron(Matrix::Identity(2, 2), Matrix(model.W_U * model.W_E));
    CHECK(vect::relativeResidual(terms[0].flat_map, expected) <= 1e-13);
}

TEST_CASE("expandPaths: one layer, one head has the direct and the mixed route") {
    Rng rng(2, "paths1");
    auto model = lawcheck::randomToyModel(1, 1, 3, 3, 2, 2, rng);
    const auto terms = circuits::expandPaths(model, 2);
    REQUIRE(terms.size() == 2);
    CHECK(terms[0].heads.empty());
    REQUIRE(terms[1].heads.size() == 1);
    CHECK(terms[1].heads[0] == std::make_pair<Index, Index>(0, 0));

    const Matrix lift_u = vect::kron(Matrix::Identity(2, 2), model.W_U);
    const Matrix lift_e = vect::kron(Matrix::Identity(2, 2), model.W_E);
    const auto& ah = model.layers[0][0];
    const Matrix expected =
        lift_u * circuits::headContribution(ah.head, ah.mixer) * lift_e;
    CHECK(vect::relativeResidual(terms[1].flat_map, expected) <= 1e-13);
}

TEST_CASE("expandPaths: two stacked heads compose OV circuits with mixer product") {
    Rng rng(3, "paths2");
    auto model = lawcheck::randomToyModel(2, 1, 3, 3, 2, 2, rng);
    const auto terms = circuits::expandPaths(model, 2);
    REQUIRE(terms.size() == 4);

    // lexicographic: [], [(0,0)], [(0,0),(1,0)], [(1,0)]
    CHECK(terms[0].heads.empty());
    CHECK(terms[1].heads == std::vector<std::pair<Index, Index>>{{0, 0}});
    CHECK(terms[2].heads == std::vector<std::pair<Index, Index>>{{0, 0}, {1, 0}});
    CHECK(terms[3].heads == std::vector<std::pair<Index, Index>>{{1, 0}});

    // the through-both route is the virtual-head composition: mixers multiply
    // and OV circuits multiply
    const auto& first = model.layers[0][0];
    const auto& second = model.layers[1][0];
    const Matrix lift_u = vect::kron(Matrix::Identity(2, 2), model.W_U);
    const Matrix lift_e = vect::kron(Matrix::Identity(2, 2), model.W_E);
    const Matrix expected =
        lift_u *
        oracles::kronOracle(Matrix(second.mixer * first.mixer),
                            circuits::virtualHead(second.head, first.head)) *
        lift_e;
    CHECK(vect::relativeResidual(terms[2].flat_map, expected) <= 1e-12);
}

TEST_CASE("expandPaths enforces the route limit") {
    Rng rng(4, "pathslimit");
    auto model = lawcheck::randomToyModel(13, 1, 2, 2, 1, 2, rng); // 2^13 routes
    CHECK_THROWS_AS((void)circuits::expandPaths(model, 2, 4096), BudgetError);
}

TEST_CASE("checkPathSum: zero layers, parallel heads, deep model") {
    Rng rng(31, "pathsum");
    auto empty = lawcheck::randomToyModel(0, 0, 4, 3, 2, 3, rng);
    const auto r0 = circuits::checkPathSum(empty, 3);
    CHECK(r0.pass);
    CHECK(r0.residual == 0.0);
    CHECK(r0.path_count == 1);

    auto single = lawcheck::randomToyModel(1, 2, 4, 3, 2, 3, rng);
    const auto r1 = circuits::checkPathSum(single, 3);
    CHECK(r1.pass);
    CHECK(r1.path_count == 3);
    CHECK(r1.residual <= 1e-10);

    auto deep = lawcheck::randomToyModel(3, 2, 4, 3, 2, 3, rng);
    const auto r3 = circuits::checkPathSum(deep, 3);
    CHECK(r3.pass);
    CHECK(r3.path_count == 27);
    CHECK(r3.residual <= 1e-10);
}

TEST_CASE("virtualHead: zero write-back, identity factor, oracle and rank bound") {
    Rng rng(41, "virtual");
    auto h1 = randomHead(2, 4, rng);
    h1.W_O.setZero();
    const auto h2 = randomHead(3, 4, rng);
    CHECK(circuits::virtualHead(h2, h1).norm() == 0.0);

    // OV of the first factor the identity: composition is the other circuit.
    const auto identity_head =
        circuits::makeHead(rng.matrix(4, 4), rng.matrix(4, 4), Matrix::Identity(4, 4),
                           Matrix::Identity(4, 4));
    CHECK(vect::relativeResidual(circuits::virtualHead(h2, identity_head),
                                 circuits::ovCircuit(h2)) <= 1e-14);

    Rng rng2(42, "virtual2");
    const auto a = randomHead(3, 5, rng2);
    const auto b = randomHead(2, 5, rng2);
    const Matrix got = circuits::virtualHead(b, a);
    const Matrix want =
        oracles::naiveMatmul(circuits::ovCircuit(b), circuits::ovCircuit(a));
    CHECK(vect::relativeResidual(got, want) <= 1e-13);
    CHECK(vect::numericalRank(got) <= 2);
}

TEST_CASE("virtualHead associates with plain matrix products") {
    Rng rng(43, "virtual.assoc");
    const auto h1 = randomHead(2, 4, rng);
    const auto h2 = randomHead(2, 4, rng);
    const auto h3 = randomHead(3, 4, rng);
    const Matrix left = circuits::ovCircuit(h3) * circuits::virtualHead(h2, h1);
    const Matrix right = circuits::virtualHead(h3, h2) * circuits::ovCircuit(h1);
    CHECK(vect::relativeResidual(left, right) <= 1e-11);
}

TEST_CASE("circuitsAsPara: direct model and shallow stacks agree with the forward map") {
    Rng rng(51, "cpara");
    auto empty = lawcheck::randomToyModel(0, 0, 3, 3, 2, 2, rng);
    const auto r0 = circuits::circuitsAsPara(empty, 2);
    CHECK(r0.pass);
    CHECK(r0.residual <= 1e-12);

    auto single = lawcheck::randomToyModel(1, 1, 4, 3, 2, 3, rng);
    const auto r1 = circuits::circuitsAsPara(single, 3);
    CHECK(r1.pass);
    CHECK(r1.composite_param_dim == 145); // (1 + 9*16)

    auto two = lawcheck::randomToyModel(2, 1, 3, 3, 2, 2, rng);
    const auto r2 = circuits::circuitsAsPara(two, 2);
    CHECK(r2.pass);
    CHECK(r2.residual <= 1e-10);
}

TEST_CASE("circuitsAsPara coherence wherever the path sum holds") {
    Rng rng(52, "cpara.prop");
    for (int t = 0; t < 5; ++t) {
        auto model = lawcheck::randomToyModel(rng.integer(0, 2), rng.integer(1, 2), 3, 2, 2,
                                              2, rng);
        const auto paths = circuits::checkPathSum(model, 2);
        const auto coherence = circuits::circuitsAsPara(model, 2);
        CHECK(paths.pass);
        CHECK(coherence.pass);
    }
}

TEST_CASE("attentionScores: zero input, single token, per-pair oracle") {
    Rng rng(61, "scores");
    const auto head = randomHead(2, 3, rng);
    CHECK(circuits::attentionScores(head, Vector::Zero(12), 4).norm() == 0.0);

    const Vector single = rng.vector(3);
    const Matrix s1 = circuits::attentionScores(head, single, 1);
    const Matrix qk = circuits::qkCircuit(head);
    CHECK(s1(0, 0) == doctest::Approx(single.transpose() * qk * single).epsilon(1e-12));

    const Index n = 4;
    const Vector X = rng.vector(n * 3);
    const Matrix scores = circuits::attentionScores(head, X, n);
    for (Index dst = 0; dst < n; ++dst)
        for (Index src = 0; src < n; ++src) {
            const double want = X.segment(dst * 3, 3).transpose() * qk * X.segment(src * 3, 3);
            CHECK(scores(dst, src) == doctest::Approx(want).epsilon(1e-11));
        }
}

TEST_CASE("property: rank bounds hold for 100 random heads") {
    Rng rng(62, "ranks");
    for (int t = 0; t < 100; ++t) {
        const Index d_model = rng.integer(2, 6);
        const Index d_head = rng.integer(1, d_model);
        const auto head = randomHead(d_head, d_model, rng);
        CHECK(vect::numericalRank(circuits::qkCircuit(head)) <= d_head);
        CHECK(vect::numericalRank(circuits::ovCircuit(head)) <= d_head);
    }
}

TEST_CASE("validateModel names the offending field") {
    Rng rng(7, "validate");
    auto model = lawcheck::randomToyModel(1, 1, 3, 3, 2, 2, rng);
    model.layers[0][0].mixer = Matrix::Zero(3, 3); // wrong: n is 2
    CHECK_THROWS_WITH_AS(circuits::validateModel(model), doctest::Contains("mixer"),
                         ParseError);

    auto bad_embed = lawcheck::randomToyModel(1, 1, 3, 3, 2, 2, rng);
    bad_embed.W_E = Matrix::Zero(2, 3);
    CHECK_THROWS_WITH_AS(circuits::validateModel(bad_embed), doctest::Contains("W_E"),
                         ParseError);
}

TEST_CASE("sequence length must match the model configuration") {
    Rng rng(8, "n.mismatch");
    auto model = lawcheck::randomToyModel(1, 1, 3, 3, 2, 2, rng);
    CHECK_THROWS_AS((void)circuits::forwardMap(model, 3), DimensionError);
}
