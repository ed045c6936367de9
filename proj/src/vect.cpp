#include "paravect/vect.hpp"

#include <atomic>
#include <cmath>

namespace paravect {

namespace {
std::atomic<std::size_t> g_element_budget{std::size_t{1} << 26};
}

std::size_t elementBudget() { return g_element_budget.load(); }

void setElementBudget(std::size_t elements) { g_element_budget.store(elements); }

void requireWithinBudget(Index rows, Index cols, const char* what) {
    if (rows < 0 || cols < 0)
        throw DimensionError(std::string(what) + ": negative dimension " + shapeString(rows, cols));
    const auto r = static_cast<std::size_t>(rows);
    const auto c = static_cast<std::size_t>(cols);
    if (r != 0 && c > g_element_budget.load() / r)
        throw BudgetError(std::string(what) + ": result " + shapeString(rows, cols) +
                          " exceeds element budget of " + std::to_string(g_element_budget.load()));
}

} // namespace paravect

namespace paravect::vect {

Permutation Permutation::identity(Index n) {
    Permutation p;
    p.n = n;
    p.image.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) p.image[static_cast<std::size_t>(i)] = i;
    return p;
}

Permutation Permutation::make(std::vector<Index> image) {
    const Index n = static_cast<Index>(image.size());
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (Index v : image) {
        if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
            throw DimensionError("Permutation: image is not a bijection on {0,...," +
                                 std::to_string(n - 1) + "}");
        seen[static_cast<std::size_t>(v)] = true;
    }
    Permutation p;
    p.n = n;
    p.image = std::move(image);
    return p;
}

Permutation compose(const Permutation& p, const Permutation& q) {
    if (p.n != q.n)
        throw DimensionError("Permutation compose: sizes differ (" + std::to_string(p.n) +
                             " vs " + std::to_string(q.n) + ")");
    Permutation r;
    r.n = p.n;
    r.image.resize(static_cast<std::size_t>(p.n));
    for (Index i = 0; i < p.n; ++i)
        r.image[static_cast<std::size_t>(i)] =
            p.image[static_cast<std::size_t>(q.image[static_cast<std::size_t>(i)])];
    return r;
}

Permutation inverse(const Permutation& p) {
    Permutation r;
    r.n = p.n;
    r.image.resize(static_cast<std::size_t>(p.n));
    for (Index i = 0; i < p.n; ++i)
        r.image[static_cast<std::size_t>(p.image[static_cast<std::size_t>(i)])] = i;
    return r;
}

Matrix identity(Index n) { return Matrix::Identity(n, n); }

Matrix matrixFromRowMajor(Index rows, Index cols, const std::vector<double>& data) {
    if (rows < 0 || cols < 0)
        throw DimensionError("matrix: negative dimension " + shapeString(rows, cols));
    if (static_cast<Index>(data.size()) != rows * cols)
        throw DimensionError("matrix: data length " + std::to_string(data.size()) +
                             " does not equal rows*cols for shape " + shapeString(rows, cols));
    for (double v : data)
        if (!std::isfinite(v))
            throw ParseError("matrix: non-finite entry in " + shapeString(rows, cols) + " payload");
    Matrix m(rows, cols);
    for (Index i = 0; i < rows * cols; ++i) m.data()[i] = data[static_cast<std::size_t>(i)];
    return m;
}

Matrix compose(const Matrix& g, const Matrix& f) {
    if (g.cols() != f.rows())
        throw DimensionError("compose: dimension mismatch, left is " +
                             shapeString(g.rows(), g.cols()) + ", right is " +
                             shapeString(f.rows(), f.cols()) +
                             " (left.cols must equal right.rows)");
    return g * f;
}

Vector kronVec(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

Matrix directSum(const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

Matrix permMatrix(const Permutation& p, Index block) {
    const Index n = p.n;
    Matrix out = Matrix::Zero(n * block, n * block);
    for (Index i = 0; i < n; ++i) {
        const Index dst = p.image[static_cast<std::size_t>(i)];
        for (Index r = 0; r < block; ++r) out(dst * block + r, i * block + r) = 1.0;
    }
    return out;
}

Matrix rebracket(Index dimQ, Index dimP, Index dimX) {
    return Matrix::Identity(dimQ * dimP * dimX, dimQ * dimP * dimX);
}

Index numericalRank(const Matrix& m, double relTol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    const double cutoff = sv[0] * relTol;
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cutoff) ++rank;
    return rank;
}

double relativeResidual(const Matrix& a, const Matrix& b) {
    return (a - b).norm() / std::max(1.0, b.norm());
}

} // namespace paravect::vect
