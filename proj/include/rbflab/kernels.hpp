#pragma once

#include <Eigen/Core>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rbflab/exec.hpp"

namespace rbflab::kernels {

enum class Profile {
    matern_exp,   // phi(r) = exp(-r)
    wendland_c0,  // phi(r) = (1-r)_+^2
    wendland_c2,  // phi(r) = (1-r)_+^4 (4r+1)
};

// A radial basis function kernel k(x, y) = phi(|x - y| / lengthscale) of
// finite smoothness tau. The Fourier-decay constants c_phi <= C_phi sandwich
// the transform of the profile; they are unknown for the Wendland profiles.
struct RadialKernel {
    std::string name;
    Profile profile = Profile::matern_exp;
    double tau = 1.0;
    double lengthscale = 1.0;
    std::optional<double> fourier_lower;  // c_phi
    std::optional<double> fourier_upper;  // C_phi

    double phi(double r) const {
        const double t = r / lengthscale;
        switch (profile) {
            case Profile::matern_exp:
                return std::exp(-t);
            case Profile::wendland_c0: {
                const double u = 1.0 - t;
                return u > 0.0 ? u * u : 0.0;
            }
            case Profile::wendland_c2: {
                const double u = 1.0 - t;
                return u > 0.0 ? u * u * u * u * (4.0 * t + 1.0) : 0.0;
            }
        }
        return 0.0;
    }

    // Closed-form transform of the profile, where known. Only the Matern
    // profile at unit lengthscale ships one.
    bool has_fourier_hat() const {
        return profile == Profile::matern_exp && lengthscale == 1.0;
    }
    double fourier_hat(double omega) const;
};

// Symmetric matrix of kernel evaluations over a set of centers.
struct GramMatrix {
    Eigen::MatrixXd entries;
    std::optional<double> min_eig;  // cached by callers that computed it
};

// k(x, y) = phi(|x - y|). Throws UsageError on dimension mismatch.
double eval_kernel(const RadialKernel& kernel, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

// Dense Gram matrix over pairwise-distinct centers (rows of `points`).
// Only the lower triangle is evaluated; the upper is mirrored, so the
// result is symmetric by construction. Throws UsageError naming the
// offending indices if two centers coincide.
GramMatrix assemble_gram(const RadialKernel& kernel, const Eigen::MatrixXd& points,
                         ExecMode mode = default_exec_mode());

// The kernels shipped with the library. Wendland entries carry the tau
// appropriate for d = 1; reconfigure tau explicitly for other dimensions.
const std::vector<RadialKernel>& builtin_kernels();

// Registry lookup. Throws UsageError for unknown names.
const RadialKernel& find_kernel(const std::string& name);

// Verifies tau > d/2 for use on a d-dimensional domain.
void check_dimension(const RadialKernel& kernel, int dim);

// Checks c_phi (1+w^2)^-tau <= fourier_hat(w) <= C_phi (1+w^2)^-tau on a
// frequency grid. Returns the largest relative violation (<= 0 when the
// sandwich holds). Throws UsageError when the kernel has no closed-form
// transform or no Fourier constants.
double fourier_sandwich_violation(const RadialKernel& kernel,
                                  const std::vector<double>& frequencies);

namespace detail {
void gram_serial(const RadialKernel& kernel, const Eigen::MatrixXd& points,
                 Eigen::MatrixXd& out);
void gram_omp(const RadialKernel& kernel, const Eigen::MatrixXd& points,
              Eigen::MatrixXd& out);
}  // namespace detail

}  // namespace rbflab::kernels
