#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbflab/geometry.hpp"
#include "rbflab/interpolation.hpp"
#include "rbflab/kernels.hpp"

namespace rbflab::subsampling {

using DomainFunction = std::function<double(const Eigen::VectorXd&)>;

// Nearest-point patches E_j around the first N greedy points; measures by
// candidate-grid cell counting (each grid point carries vol(Omega)/G).
struct PatchCover {
    geometry::PointSet base_points;
    std::vector<Eigen::Index> assignment;  // grid index -> patch index
    Eigen::VectorXd measures;
};

// Throws ResolutionError when the grid supplies fewer than 8 cells per patch
// on average. A seed selects an alternative greedy sequence; by default the
// domain's own sequence is used.
PatchCover build_patch_cover(const geometry::Domain& domain, std::size_t n,
                             std::optional<Eigen::VectorXd> seed = std::nullopt,
                             ExecMode mode = default_exec_mode());

// sum_j |g(y_j)| mu(E_j), the patch-quadrature approximation of the integral
// of |g| over the domain.
double riemann_quadrature(const PatchCover& cover, const DomainFunction& g);

// Shortest greedy prefix whose fill distance has dropped below q. Throws
// ResolutionError when q is too close to the candidate-grid resolution for
// the fill values to be trusted.
geometry::PointSet thin_prefix(const geometry::Domain& domain, double q,
                               std::optional<Eigen::VectorXd> seed = std::nullopt);

// Removes the points of `candidates` lying strictly inside a ball of radius
// q/2 around some point of `reference`. Throws UsageError when nothing
// survives (q too large relative to the separation of `reference`).
geometry::PointSet exclude_near(const geometry::PointSet& candidates,
                                const geometry::PointSet& reference, double q);

// L2(Omega) norm of g: graded composite Gauss-Legendre on intervals
// (optionally split at the given breakpoints), grid Riemann sum otherwise.
double continuous_l2(const geometry::Domain& domain, const DomainFunction& g,
                     const std::vector<double>& interior_breaks = {},
                     ExecMode mode = default_exec_mode());

struct SubsampleResult {
    geometry::PointSet selected;  // Y_1
    double scale = 0.0;           // the q that was used

    double sep = 0.0;             // q_{Y_1}
    double fill = 0.0;            // h_{Y_1} (grid)
    double union_sep = 0.0;       // q_{Y_0 union Y_1}
    bool sep_lower_ok = false;    // q/3 <= q_{Y_1}
    bool fill_upper_ok = false;   // h_{Y_1} <= 22 q/3, within grid slack
    bool union_ok = false;        // q_{Y_0 union Y_1} >= q/6

    double discrete_norm = 0.0;    // |g|_{L2(Y_1)}
    double continuous_norm = 0.0;  // |g|_{L2(Omega)}
    double norm_ratio = 0.0;
    double ratio_bound = 0.0;      // sqrt of the subsampling constant
    bool ratio_ok = false;

    // Selection certificate.
    Eigen::Index label = 0;             // chosen slice (0-based)
    Eigen::Index cluster_size = 0;      // common cluster size m
    Eigen::Index thin_prefix_size = 0;  // n*
    Eigen::Index survivor_count = 0;    // |Y_1''|
    Eigen::Index base_size = 0;         // N
    std::vector<Eigen::Index> cluster_sizes;  // |T_i| before truncation
    double slice_average = 0.0;    // mean of g^2 over the selected slice
    double cluster_average = 0.0;  // mean of g^2 over all truncated clusters
};

// The full continuous-to-discrete transfer: thin the greedy sequence to
// scale q, drop points near Y_0, cluster deeper greedy points around the
// survivors, and keep the slice with the smallest mean of g^2. Preconditions
// follow the underlying theorem: q <= 2^{-1/d} c_Omega/(2 C_Omega) * q_{Y_0}
// and q <= 2r/5. If `base_size` is empty, N doubles until q_{Y_N} <= 2q/3.
SubsampleResult subsample(const geometry::Domain& domain, const DomainFunction& g,
                          const geometry::PointSet& y0, double q,
                          std::optional<std::size_t> base_size = std::nullopt,
                          std::optional<Eigen::VectorXd> seed = std::nullopt,
                          ExecMode mode = default_exec_mode());

struct SequenceLevel {
    int level = 0;
    Eigen::Index n_points = 0;
    double scale = 0.0;     // target scale a^m q_{X_0} (q_{X_0} itself at level 0)
    double sep = 0.0;       // q_{X_m}
    double fill = 0.0;      // h_{X_m}
    double disc_err = 0.0;  // |f - s_m|_{L2(X_{m+1})}; NaN on the last level
    double cont_err = 0.0;  // |f - s_m|_{L2(Omega)}
    double ratio = 0.0;     // disc_err / cont_err
    double bound = 0.0;     // sqrt of the subsampling constant
};

struct NestedSequenceResult {
    std::vector<geometry::PointSet> sets;  // X_0 subset X_1 subset ...
    std::vector<SequenceLevel> levels;
    double contraction = 0.0;  // a = (3/22) 2^{-1/d} c_Omega / (2 C_Omega)
    bool truncated = false;
    std::string warning;
};

// Iterated subsampling with g = f - s_{X_m}, Y_0 = X_m and scale
// a^{m+1} q_{X_0}. X_0 is the shortest greedy prefix with fill below h0.
// Levels stop early (with a warning) once the candidate grid cannot resolve
// the next scale.
NestedSequenceResult build_nested_sequence(const geometry::Domain& domain,
                                           const kernels::RadialKernel& kernel,
                                           const DomainFunction& f, int max_levels,
                                           double h0,
                                           ExecMode mode = default_exec_mode());

// CSV columns (m, n_points, q, h, disc_err, cont_err, ratio, bound_sqrtC).
void write_sequence_csv(std::ostream& out, const NestedSequenceResult& result);
void write_sequence_csv(const std::string& path, const NestedSequenceResult& result);

}  // namespace rbflab::subsampling
