#include "paravect/equivariance.hpp"

namespace paravect::equivariance {

Matrix extend(const Matrix& per_token, Index n) {
    if (n < 1) throw DimensionError("extend: n must be positive");
    return vect::kron(Matrix::Identity(n, n), per_token);
}

EquivarianceReport checkEquivariance(const Matrix& per_token, const vect::Permutation& sigma) {
    const Index n = sigma.n;
    const Matrix extended = extend(per_token, n);
    const Matrix act_then_map = extended * vect::permMatrix(sigma, per_token.cols());
    const Matrix map_then_act = vect::permMatrix(sigma, per_token.rows()) * extended;

    EquivarianceReport report;
    report.max_abs_diff = act_then_map.size() == 0
                              ? 0.0
                              : (act_then_map - map_then_act).cwiseAbs().maxCoeff();
    if (report.max_abs_diff == 0.0) {
        report.mode = "exact";
        report.pass = true;
    } else {
        report.mode = "tolerance";
        report.pass = report.max_abs_diff <= 1e-14;
    }
    return report;
}

CommutatorReport symmetryBreakingWitness(const Matrix& coupled, const vect::Permutation& sigma) {
    if (coupled.rows() != coupled.cols())
        throw DimensionError("symmetryBreakingWitness: map is " +
                             shapeString(coupled.rows(), coupled.cols()) + ", must be square");
    if (sigma.n == 0 || coupled.rows() % sigma.n != 0)
        throw DimensionError("symmetryBreakingWitness: map of dim " +
                             std::to_string(coupled.rows()) +
                             " does not split into " + std::to_string(sigma.n) + " token blocks");
    const Matrix rep = vect::permMatrix(sigma, coupled.rows() / sigma.n);
    CommutatorReport report;
    report.commutator_norm = (coupled * rep - rep * coupled).norm();
    report.commutes = report.commutator_norm == 0.0;
    return report;
}

} // namespace paravect::equivariance
