#include "rbflab/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "rbflab/errors.hpp"

namespace rbflab::linalg {

namespace {

// In-place lower Cholesky; returns false on breakdown. Column-blocked so the
// trailing update runs as matrix products, which Eigen vectorizes well.
bool cholesky_in_place(Eigen::MatrixXd& a) {
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(a);
    return llt.info() == Eigen::Success;
}

}  // namespace

SpdSolver::SpdSolver(Eigen::MatrixXd matrix) : factor_(std::move(matrix)) {
    const Eigen::Index n = factor_.rows();
    if (n == 0 || factor_.cols() != n)
        throw UsageError("SpdSolver: matrix must be square and non-empty");
    // The in-place LLT only writes the lower triangle, so the strict upper
    // plus a saved diagonal is enough to restore the matrix on retry.
    const Eigen::VectorXd diag = factor_.diagonal();
    if (!cholesky_in_place(factor_)) {
        const double ridge = 1e-14 * diag.sum() / static_cast<double>(n);
        factor_.triangularView<Eigen::StrictlyLower>() =
            factor_.triangularView<Eigen::StrictlyUpper>().transpose();
        factor_.diagonal() = diag.array() + ridge;
        if (!cholesky_in_place(factor_)) {
            double lambda_est = std::numeric_limits<double>::quiet_NaN();
            if (n <= 2048) {
                factor_.triangularView<Eigen::StrictlyLower>() =
                    factor_.triangularView<Eigen::StrictlyUpper>().transpose();
                factor_.diagonal() = diag.array() + ridge;
                lambda_est = factor_.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff();
            }
            std::ostringstream msg;
            msg << "Cholesky factorization failed after ridge " << ridge
                << " (min eigenvalue estimate " << lambda_est << ")";
            throw ConditioningError(msg.str(), lambda_est, 0.0);
        }
        report_.regularized = true;
        report_.ridge = ridge;
    }
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = rhs;
    factor_.triangularView<Eigen::Lower>().solveInPlace(x);
    factor_.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
    return x;
}

Eigen::MatrixXd SpdSolver::solve(const Eigen::MatrixXd& rhs) const {
    Eigen::MatrixXd x = rhs;
    factor_.triangularView<Eigen::Lower>().solveInPlace(x);
    factor_.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
    return x;
}

double SpdSolver::inverse_quadratic_form(const Eigen::VectorXd& b) const {
    Eigen::VectorXd y = b;
    factor_.triangularView<Eigen::Lower>().solveInPlace(y);
    return y.squaredNorm();
}

SymEigen sym_eigen(const Eigen::MatrixXd& matrix) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
    if (solver.info() != Eigen::Success)
        throw NumericalError("symmetric eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double smallest_eigenvalue(const Eigen::MatrixXd& matrix, Eigen::Index dense_limit,
                           double tol) {
    const Eigen::Index n = matrix.rows();
    if (n <= dense_limit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix,
                                                              Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success)
            throw NumericalError("symmetric eigensolver did not converge");
        return solver.eigenvalues().minCoeff();
    }
    // Inverse power iteration on the Cholesky factorization.
    SpdSolver solver(matrix);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    double lambda = 0.0;
    double prev = -1.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd w = solver.solve(v);
        const double norm = w.norm();
        if (norm == 0.0) throw NumericalError("inverse power iteration broke down");
        v = w / norm;
        lambda = v.dot(matrix.selfadjointView<Eigen::Lower>() * v);
        if (prev > 0.0 && std::abs(lambda - prev) <= tol * std::abs(lambda)) break;
        prev = lambda;
    }
    return lambda;
}

}  // namespace rbflab::linalg
