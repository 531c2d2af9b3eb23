#pragma once

#include <Eigen/Core>

#include "rbflab/exec.hpp"
#include "rbflab/geometry.hpp"
#include "rbflab/kernels.hpp"
#include "rbflab/linalg.hpp"

namespace rbflab::interpolation {

// Minimum native-norm interpolant s = sum_j coeffs[j] k(., centers[j]).
struct Interpolant {
    kernels::RadialKernel kernel;
    geometry::PointSet centers;
    Eigen::VectorXd coeffs;
    double residual_at_nodes = 0.0;  // max |s(x_i) - f(x_i)|
    linalg::FactorizationReport factorization;
};

// Solves A_X alpha = values. Retries once with a tiny ridge on breakdown;
// a second breakdown raises ConditioningError carrying the smallest
// eigenvalue estimate and the separation distance.
Interpolant fit(const kernels::RadialKernel& kernel, const geometry::PointSet& centers,
                const Eigen::VectorXd& values, ExecMode mode = default_exec_mode());

// One assembly and factorization shared across several right-hand sides
// (columns of `values`).
std::vector<Interpolant> fit_multi(const kernels::RadialKernel& kernel,
                                   const geometry::PointSet& centers,
                                   const Eigen::MatrixXd& values,
                                   ExecMode mode = default_exec_mode());

Eigen::VectorXd evaluate(const Interpolant& s, const geometry::PointSet& pts,
                         ExecMode mode = default_exec_mode());
double evaluate_at(const Interpolant& s, const Eigen::VectorXd& p);

// Evaluates several interpolants sharing the same centers; kernel values are
// computed once per (point, center) pair. Column c of the result holds the
// values of the interpolant with coefficients coeffs.col(c).
Eigen::MatrixXd evaluate_multi(const kernels::RadialKernel& kernel,
                               const geometry::PointSet& centers,
                               const Eigen::MatrixXd& coeffs, const Eigen::MatrixXd& pts,
                               ExecMode mode = default_exec_mode());

struct PowerFunctionResult {
    Eigen::VectorXd values;        // P_X at each evaluation point, clamped at 0
    double most_negative = 0.0;    // most negative raw P^2 before clamping
};

// P_X(x)^2 = k(x,x) - b(x)^T A_X^{-1} b(x). With empty centers this reduces
// to P(x) = sqrt(k(x,x)).
PowerFunctionResult power_function(const kernels::RadialKernel& kernel,
                                   const geometry::PointSet& centers,
                                   const geometry::PointSet& pts,
                                   ExecMode mode = default_exec_mode());

// Measured side of the stability bound lambda_min(A_X) >= c0 q^{2 tau - d}.
struct MinEigReport {
    double min_eig = 0.0;
    double separation = 0.0;
    double separation_power = 0.0;  // q^{2 tau - d}
    double ratio = 0.0;             // empirical c0
};
MinEigReport min_eig_lower_bound_check(const kernels::RadialKernel& kernel,
                                       const geometry::PointSet& centers,
                                       ExecMode mode = default_exec_mode());

// Checks |s|_H^2 <= |A^{-1}|_2 * |X| * |s|_{L2(X)}^2.
struct NativeNormReport {
    double native_sq = 0.0;       // alpha^T A alpha
    double bound = 0.0;           // |A^{-1}| * |X| * discrete_sq
    double inverse_norm = 0.0;    // |A_X^{-1}|_{2,2}
    double discrete_sq = 0.0;     // (1/|X|) sum s(x_i)^2
    bool holds = false;
};
NativeNormReport native_norm_bound(const Interpolant& s,
                                   ExecMode mode = default_exec_mode());

// alpha^T A_X alpha, assembling kernel values on the fly.
double native_norm_squared(const Interpolant& s, ExecMode mode = default_exec_mode());

}  // namespace rbflab::interpolation
