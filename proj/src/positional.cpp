#include "paravect/positional.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace paravect::positional {

AdditiveEncoding makeAdditive(Vector base) {
    if (base.size() < 1) throw DimensionError("AdditiveEncoding: base must be nonempty");
    return AdditiveEncoding{base.size(), std::move(base)};
}

SinusoidalEncoding makeSinusoidal(Index dim, double base_freq) {
    if (dim < 2 || dim % 2 != 0)
        throw DimensionError("SinusoidalEncoding: dim must be a positive even integer, got " +
                             std::to_string(dim));
    if (!(base_freq > 0.0))
        throw DimensionError("SinusoidalEncoding: base_freq must be positive");
    return SinusoidalEncoding{dim, base_freq};
}

ExternalEncoding makeExternal(std::vector<Vector> table) {
    if (table.empty()) throw DimensionError("ExternalEncoding: table must be nonempty");
    const Index d = table.front().size();
    for (const auto& row : table)
        if (row.size() != d)
            throw DimensionError("ExternalEncoding: ragged table, row of dim " +
                                 std::to_string(row.size()) + " vs " + std::to_string(d));
    return ExternalEncoding{d, std::move(table)};
}

Index dim(const Encoding& e) {
    return std::visit([](const auto& enc) { return enc.dim; }, e);
}

std::optional<Index> domainSize(const Encoding& e) {
    if (const auto* ext = std::get_if<ExternalEncoding>(&e))
        return static_cast<Index>(ext->table.size());
    return std::nullopt;
}

Vector encode(const Encoding& e, Index m) {
    if (m < 0) throw DimensionError("encode: position must be nonnegative");
    if (const auto* add = std::get_if<AdditiveEncoding>(&e))
        return static_cast<double>(m) * add->base;
    if (const auto* sin = std::get_if<SinusoidalEncoding>(&e)) {
        Vector p(sin->dim);
        for (Index j = 0; 2 * j < sin->dim; ++j) {
            const double freq =
                std::pow(sin->base_freq, -2.0 * static_cast<double>(j) /
                                             static_cast<double>(sin->dim));
            const double angle = static_cast<double>(m) * freq;
            p[2 * j] = std::sin(angle);
            p[2 * j + 1] = std::cos(angle);
        }
        return p;
    }
    const auto& ext = std::get<ExternalEncoding>(e);
    if (m >= static_cast<Index>(ext.table.size()))
        throw DimensionError("encode: position " + std::to_string(m) +
                             " outside external table of size " +
                             std::to_string(ext.table.size()));
    return ext.table[static_cast<std::size_t>(m)];
}

Vector shift(const AdditiveEncoding& e, Index m, const Vector& x) {
    if (x.size() != e.dim)
        throw DimensionError("shift: x has dim " + std::to_string(x.size()) +
                             ", encoding has dim " + std::to_string(e.dim));
    return x + encode(Encoding{e}, m);
}

ActionLawReport checkActionLaws(const Encoding& e, Index max_m, double tol) {
    ActionLawReport report;
    report.tolerance = tol;
    Index limit = max_m;
    if (auto size = domainSize(e)) limit = std::min(limit, *size - 1);

    report.origin_residual = encode(e, 0).norm();
    if (report.origin_residual > tol) report.witness = std::make_pair(Index{0}, Index{0});

    for (Index m = 0; m <= limit; ++m) {
        const Vector pm = encode(e, m);
        for (Index m2 = m; m2 <= limit; ++m2) {
            if (auto size = domainSize(e); size && m + m2 >= *size) break;
            const double defect = (encode(e, m + m2) - pm - encode(e, m2)).norm();
            if (defect > report.max_defect) report.max_defect = defect;
            if (defect > tol && !report.witness) report.witness = std::make_pair(m, m2);
        }
    }
    report.pass = report.origin_residual <= tol && report.max_defect <= tol;
    return report;
}

InjectivityReport checkInjectivity(const Encoding& e, Index N, double tol) {
    if (N < 2) throw DimensionError("checkInjectivity: N must be at least 2");
    if (auto size = domainSize(e); size && N > *size)
        throw DimensionError("checkInjectivity: N exceeds external table size");
    std::vector<Vector> points;
    points.reserve(static_cast<std::size_t>(N));
    for (Index m = 0; m < N; ++m) points.push_back(encode(e, m));

    InjectivityReport report;
    report.tolerance = tol;
    report.min_distance = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < N; ++i)
        for (Index j = i + 1; j < N; ++j) {
            const double dist = (points[static_cast<std::size_t>(i)] -
                                 points[static_cast<std::size_t>(j)])
                                    .norm();
            if (dist < report.min_distance) {
                report.min_distance = dist;
                report.argmin = {i, j};
            }
        }
    report.pass = report.min_distance > tol;
    return report;
}

std::optional<AdditivityWitness> nonadditivityWitness(const Encoding& e, Index max_m) {
    if (max_m < 1) throw DimensionError("nonadditivityWitness: max_m must be at least 1");
    Index limit = max_m;
    if (auto size = domainSize(e)) limit = std::min(limit, *size - 1);

    AdditivityWitness best;
    bool found = false;
    for (Index m = 0; m <= limit; ++m) {
        const Vector pm = encode(e, m);
        for (Index m2 = m; m2 <= limit; ++m2) {
            if (auto size = domainSize(e); size && m + m2 >= *size) break;
            const double defect = (encode(e, m + m2) - pm - encode(e, m2)).norm();
            if (!found || defect > best.defect) {
                best = {m, m2, defect};
                found = true;
            }
        }
    }
    if (!found || best.defect <= 1e-12) return std::nullopt;
    return best;
}

FactorResult factorThrough(const Encoding& p, const Encoding& q, Index N) {
    if (N < 1) throw DimensionError("factorThrough: N must be positive");
    if (auto size = domainSize(p); size && N > *size)
        throw DimensionError("factorThrough: N exceeds source table size");
    if (auto size = domainSize(q); size && N > *size)
        throw DimensionError("factorThrough: N exceeds target table size");

    const Index pd = dim(p);
    const Index qd = dim(q);
    Matrix P(N, pd), Q(N, qd);
    for (Index m = 0; m < N; ++m) {
        P.row(m) = encode(p, m).transpose();
        Q.row(m) = encode(q, m).transpose();
    }

    // min_f Σ_m ‖f·p(m) − q(m)‖² stacked as P fᵀ ≈ Q, solved by SVD so
    // rank-deficient sources get the minimum-norm solution instead of blowing
    // up.
    Eigen::JacobiSVD<Matrix> svd(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? sv[0] * 1e-10 : 0.0;
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cutoff) ++rank;
    svd.setThreshold(1e-10);

    FactorResult result;
    result.f = Matrix(svd.solve(Q)).transpose();
    result.rank = rank;
    result.unique = rank == pd;
    for (Index m = 0; m < N; ++m) {
        const double r = (result.f * P.row(m).transpose() - Q.row(m).transpose()).norm();
        result.max_residual = std::max(result.max_residual, r);
    }
    return result;
}

} // namespace paravect::positional
