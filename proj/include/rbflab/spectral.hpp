#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

#include "rbflab/geometry.hpp"
#include "rbflab/kernels.hpp"
#include "rbflab/quadrature.hpp"

namespace rbflab::spectral {

// Nystrom approximation of the Mercer eigendecomposition of the kernel
// integral operator on an interval domain. Eigenvalues descend and are
// strictly positive; eigenfunctions are orthonormal in the quadrature inner
// product by construction and extend to arbitrary points through the kernel.
struct SpectralModel {
    std::function<double(double, double)> kernel_fn;
    quadrature::Rule rule;
    Eigen::VectorXd eigenvalues;      // size = rank, descending
    Eigen::MatrixXd basis;            // rule.size() x rank, orthonormal columns u_j
    Eigen::VectorXd sqrt_weights;     // cached sqrt of rule.weights
    bool truncated = false;           // rank reduced because of non-positive eigenvalues
    std::string warning;

    Eigen::Index rank() const { return eigenvalues.size(); }
};

// Builds the model from the weighted kernel matrix B = W^{1/2} K W^{1/2}.
// Requires rule.size() >= 4 * rank. Non-positive trailing eigenvalues
// truncate the rank with a warning recorded on the model.
SpectralModel nystrom_decompose(const kernels::RadialKernel& kernel,
                                const geometry::Domain& domain, Eigen::Index rank,
                                const quadrature::Rule& rule,
                                ExecMode mode = default_exec_mode());

// Same decomposition for an arbitrary symmetric kernel on the interval.
SpectralModel nystrom_decompose_general(std::function<double(double, double)> kernel_fn,
                                        Eigen::Index rank, const quadrature::Rule& rule,
                                        ExecMode mode = default_exec_mode());

// Default rule: composite Gauss-Legendre, 8 points per panel, uniform
// panels, node count 4 * rank.
SpectralModel nystrom_decompose(const kernels::RadialKernel& kernel,
                                const geometry::Domain& domain, Eigen::Index rank,
                                ExecMode mode = default_exec_mode());

// phi_j at the quadrature nodes (column j).
Eigen::MatrixXd eigenfunctions_at_nodes(const SpectralModel& model);

// Nystrom extension phi_j(x) = (1/lambda_j) sum_i sqrt(w_i) u_ij k(x, q_i).
double eval_eigenfunction(const SpectralModel& model, Eigen::Index j, double x);

// L2 projection coefficients <f, phi_j> computed with the model's rule.
Eigen::VectorXd coefficients(const SpectralModel& model,
                             const std::function<double(double)>& f);

// Truncated Mercer sum  sum_{j < rank} lambda_j phi_j(x) phi_j(y).
double mercer_eval(const SpectralModel& model, double x, double y, Eigen::Index rank);

struct PowerSpaceNorm {
    double theta = 0.0;
    double value = 0.0;
    Eigen::Index truncation_rank = 0;
    double tail_estimate = 0.0;  // norm contribution of the last decade of ranks
};

// | f |_{H_theta} = sqrt( sum_j c_j^2 / lambda_j^theta ) over the retained
// rank. The tail estimate reports the contribution of ranks in (rank/10, rank].
PowerSpaceNorm power_norm(const SpectralModel& model, const Eigen::VectorXd& coeffs,
                          double theta);
PowerSpaceNorm power_norm(const SpectralModel& model,
                          const std::function<double(double)>& f, double theta);

// A callable sum_j coeffs[j] phi_j(x); handy for building finite-rank tests.
std::function<double(double)> finite_rank_function(const SpectralModel& model,
                                                   const Eigen::VectorXd& coeffs);

struct HolderReport {
    double lhs = 0.0;       // |g|_{H_theta}
    double rhs = 0.0;       // |g|_{H_theta1}^e1 * |g|_{H_theta2}^e2
    double norm_theta1 = 0.0;
    double norm_theta2 = 0.0;
    bool holds = false;
    bool inconclusive = false;  // negligible energy in the retained rank
};

// Interpolation inequality between power-space norms, exponents
// e1 = (theta2-theta)/(theta2-theta1), e2 = (theta-theta1)/(theta2-theta1).
HolderReport holder_check(const SpectralModel& model, const Eigen::VectorXd& coeffs,
                          double theta1, double theta, double theta2);
HolderReport holder_check(const SpectralModel& model,
                          const std::function<double(double)>& f, double theta1,
                          double theta, double theta2);

struct NestedReport {
    double norm_low = 0.0;   // |f|_{H_theta_a}
    double norm_high = 0.0;  // |f|_{H_theta_b}
    double factor = 0.0;     // max(1, lambda_1^{(theta_b-theta_a)/2})
    bool holds = false;      // norm_low <= factor * norm_high
};
NestedReport nested_power_spaces_check(const SpectralModel& model,
                                       const Eigen::VectorXd& coeffs, double theta_a,
                                       double theta_b);

// CSV with columns (j, lambda_j).
void write_spectrum_csv(std::ostream& out, const SpectralModel& model);
void write_spectrum_csv(const std::string& path, const SpectralModel& model);

}  // namespace rbflab::spectral
