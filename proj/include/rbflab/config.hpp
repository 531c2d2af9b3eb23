#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "rbflab/geometry.hpp"
#include "rbflab/kernels.hpp"
#include "rbflab/rates.hpp"

namespace rbflab::config {

// Batch experiment description. Parses from a strict JSON schema: unknown
// keys are hard errors, and parse -> serialize -> parse is the identity.
struct ExperimentConfig {
    // kernel
    std::string kernel_name = "matern-exp";
    std::optional<double> kernel_tau;          // overrides the builtin tau
    std::optional<double> kernel_lengthscale;  // overrides lengthscale 1

    // domain
    std::string domain_kind = "interval";  // interval | box | disk
    double interval_a = 0.0;
    double interval_b = 1.0;
    std::vector<double> box_lo, box_hi;
    std::optional<double> cone_angle;
    std::optional<double> cone_radius;
    double grid_resolution = 1e-3;

    // nodes
    std::string node_rule = "equidistant";  // equidistant | greedy
    std::vector<Eigen::Index> counts;
    std::vector<double> greedy_seed;  // optional seed point for greedy sampling

    // target functions: the builtin f_omega family
    std::vector<double> omegas;

    // quadrature overrides
    int quad_points_per_panel = 16;
    int quad_grading_levels = 40;

    // subsample / spectral settings
    double subsample_h0 = 0.25;
    int subsample_levels = 1;
    Eigen::Index spectral_rank = 64;

    std::string output_dir = ".";
    unsigned long seed = 0;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

kernels::RadialKernel make_kernel(const ExperimentConfig& cfg);
geometry::Domain make_domain(const ExperimentConfig& cfg);
rates::QuadratureSpec make_quadrature(const ExperimentConfig& cfg);

}  // namespace rbflab::config
