#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "paravect/equivariance.hpp"
#include "paravect/rng.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <numeric>

using namespace paravect;
using vect::Permutation;

namespace {

std::vector<Permutation> allPermutations(Index n) {
    std::vector<Index> image(static_cast<std::size_t>(n));
    std::iota(image.begin(), image.end(), Index{0});
    std::vector<Permutation> all;
    do {
        all.push_back(Permutation::make(image));
    } while (std::next_permutation(image.begin(), image.end()));
    return all;
}

} // namespace

TEST_CASE("extend: single token and identity map") {
    Rng rng(13, "extend");
    const Matrix f = rng.matrix(2, 3);
    CHECK((equivariance::extend(f, 1) - f).norm() == 0.0);
    CHECK((equivariance::extend(Matrix::Identity(4, 4), 3) - Matrix::Identity(12, 12))
              .norm() == 0.0);
}

TEST_CASE("extend applies the map per token, against the block-loop oracle") {
    Rng rng(13, "extend.oracle");
    const Matrix f = rng.matrix(2, 3);
    const Matrix extended = equivariance::extend(f, 3);
    for (int t = 0; t < 10; ++t) {
        const Vector x = rng.vector(9);
        const Vector got = extended * x;
        const Vector want = oracles::perTokenOracle(f, x, 3);
        CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("checkEquivariance: identity permutation and the 2x2 swap case") {
    Rng rng(1, "equi.id");
    const Matrix f = rng.matrix(3, 3);
    const auto id_report = equivariance::checkEquivariance(f, Permutation::identity(4));
    CHECK(id_report.pass);
    CHECK(id_report.max_abs_diff == 0.0);

    Matrix w(2, 2);
    w << 1.25, -2.5, 3.75, 4.0;
    const auto swap_report = equivariance::checkEquivariance(w, Permutation::make({1, 0}));
    CHECK(swap_report.pass);
    CHECK(swap_report.max_abs_diff == 0.0);
    CHECK(std::string(swap_report.mode) == "exact");
}

TEST_CASE("property: 100 random (map, permutation) pairs commute exactly") {
    Rng rng(2, "equi.prop");
    for (int t = 0; t < 100; ++t) {
        const Index n = rng.integer(2, 6);
        const Matrix f = rng.matrix(rng.integer(1, 4), rng.integer(1, 4));
        const auto report = equivariance::checkEquivariance(f, rng.permutation(n));
        CHECK(report.max_abs_diff == 0.0);
    }
}

TEST_CASE("representation property: composite permutations also commute") {
    Rng rng(3, "equi.rep");
    for (int t = 0; t < 25; ++t) {
        const Index n = rng.integer(2, 5);
        const Matrix f = rng.matrix(3, 2);
        const auto sigma = rng.permutation(n);
        const auto tau = rng.permutation(n);
        CHECK(equivariance::checkEquivariance(f, sigma).pass);
        CHECK(equivariance::checkEquivariance(f, tau).pass);
        CHECK(equivariance::checkEquivariance(f, vect::compose(sigma, tau)).pass);
    }
}

TEST_CASE("symmetryBreakingWitness: block-diagonal maps commute") {
    Rng rng(4, "break.diag");
    const Matrix per_token = rng.matrix(3, 3);
    const Matrix coupled = equivariance::extend(per_token, 4);
    const auto report = equivariance::symmetryBreakingWitness(coupled, rng.permutation(4));
    CHECK(report.commutes);
    CHECK(report.commutator_norm == 0.0);
}

TEST_CASE("symmetryBreakingWitness: the swap mixer commutes with the swap") {
    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    const Matrix coupled = vect::kron(swap, Matrix::Identity(3, 3));
    const auto report =
        equivariance::symmetryBreakingWitness(coupled, Permutation::make({1, 0}));
    CHECK(report.commutes);
}

TEST_CASE("symmetryBreakingWitness: a causal mixer does not commute with the swap") {
    Matrix causal(2, 2);
    causal << 1, 1, 0, 1;
    const Matrix coupled = vect::kron(causal, Matrix::Identity(3, 3));
    const auto report =
        equivariance::symmetryBreakingWitness(coupled, Permutation::make({1, 0}));
    CHECK_FALSE(report.commutes);
    // commutator of [[1,1],[0,1]] with the swap is [[1,0],[0,-1]] scaled by
    // the off-diagonal coupling, per direct computation
    CHECK(report.commutator_norm == doctest::Approx(std::sqrt(6.0)));
}

TEST_CASE("group-averaged map commutes with every permutation") {
    Rng rng(5, "average");
    for (Index n : {2, 3, 4}) {
        const Index d = 2;
        const Matrix m = rng.matrix(n * d, n * d);
        const auto group = allPermutations(n);
        Matrix averaged = Matrix::Zero(n * d, n * d);
        for (const auto& sigma : group) {
            const Matrix rep = vect::permMatrix(sigma, d);
            averaged += rep * m * rep.transpose();
        }
        averaged /= static_cast<double>(group.size());
        for (const auto& sigma : group) {
            const auto report = equivariance::symmetryBreakingWitness(averaged, sigma);
            CHECK(report.commutator_norm <= 1e-12);
        }
    }
}

TEST_CASE("shape validation") {
    CHECK_THROWS_AS(
        equivariance::symmetryBreakingWitness(Matrix::Zero(5, 5), Permutation::identity(2)),
        DimensionError);
    CHECK_THROWS_AS(
        equivariance::symmetryBreakingWitness(Matrix::Zero(4, 5), Permutation::identity(2)),
        DimensionError);
}
