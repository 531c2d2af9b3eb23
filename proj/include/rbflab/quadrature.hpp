#pragma once

#include <Eigen/Core>
#include <vector>

#include "rbflab/exec.hpp"

namespace rbflab::quadrature {

struct Rule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;

    Eigen::Index size() const { return nodes.size(); }
};

// n-point Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);

// Composite Gauss-Legendre over consecutive panels [b_0,b_1], [b_1,b_2], ...
// Breakpoints must be non-decreasing; zero-length panels are skipped.
Rule composite(const std::vector<double>& breakpoints, int points_per_panel);

// Composite rule on [a, b] with panels between consecutive interior
// breakpoints, where the first and last panels are refined geometrically
// toward the endpoints (sub-panel lengths shrinking by `ratio`,
// `grading_levels` sub-panels per boundary). Used for integrands whose
// derivatives blow up at the domain boundary.
Rule graded_composite(double a, double b, const std::vector<double>& interior,
                      int points_per_panel, int grading_levels, double ratio = 0.5);

// Uniform n-panel composite rule on [a, b].
Rule uniform_composite(double a, double b, int panels, int points_per_panel);

template <class F>
double integrate(const Rule& rule, F&& f, ExecMode mode = default_exec_mode()) {
    const double* x = rule.nodes.data();
    const double* w = rule.weights.data();
    return detail::block_sum(
        rule.size(), [&](std::ptrdiff_t i) { return w[i] * f(x[i]); }, mode);
}

}  // namespace rbflab::quadrature
