#pragma once

#include <Eigen/Core>
#include <string>

namespace rbflab::linalg {

// What the factorization actually did, for reporting.
struct FactorizationReport {
    std::string method = "llt";
    bool regularized = false;
    double ridge = 0.0;  // additive diagonal term applied on retry
};

// In-place Cholesky of a symmetric positive definite matrix. If the plain
// factorization breaks down, retries once with an additive diagonal term
// 1e-14 * trace(A)/n; a second breakdown raises ConditioningError carrying
// a smallest-eigenvalue estimate.
class SpdSolver {
public:
    explicit SpdSolver(Eigen::MatrixXd matrix);

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

    // b^T A^{-1} b without forming the inverse.
    double inverse_quadratic_form(const Eigen::VectorXd& b) const;

    Eigen::Index size() const { return factor_.rows(); }
    const FactorizationReport& report() const { return report_; }

private:
    Eigen::MatrixXd factor_;  // lower-triangular Cholesky factor
    FactorizationReport report_;
};

// All eigenvalues (ascending) and eigenvectors of a symmetric matrix.
struct SymEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};
SymEigen sym_eigen(const Eigen::MatrixXd& matrix);

// Smallest eigenvalue of a symmetric positive definite matrix. Dense solve
// up to `dense_limit`, inverse power iteration (relative tolerance `tol`)
// beyond it.
double smallest_eigenvalue(const Eigen::MatrixXd& matrix, Eigen::Index dense_limit = 2048,
                           double tol = 1e-6);

}  // namespace rbflab::linalg
