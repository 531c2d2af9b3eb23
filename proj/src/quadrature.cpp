#include "rbflab/quadrature.hpp"

#include <cmath>

#include "rbflab/errors.hpp"

namespace rbflab::quadrature {

Rule gauss_legendre(int n) {
    if (n < 1) throw UsageError("gauss_legendre: need at least one point");
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration on P_n, symmetric roots mirrored.
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[half - 1] = 0.0;
    return rule;
}

Rule composite(const std::vector<double>& breakpoints, int points_per_panel) {
    if (breakpoints.size() < 2) throw UsageError("composite: need at least two breakpoints");
    const Rule base = gauss_legendre(points_per_panel);
    std::vector<double> nodes, weights;
    nodes.reserve((breakpoints.size() - 1) * base.size());
    weights.reserve(nodes.capacity());
    for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
        const double a = breakpoints[p];
        const double b = breakpoints[p + 1];
        if (b < a) throw UsageError("composite: breakpoints must be non-decreasing");
        if (b == a) continue;
        const double mid = 0.5 * (a + b);
        const double hl = 0.5 * (b - a);
        for (Eigen::Index i = 0; i < base.size(); ++i) {
            nodes.push_back(mid + hl * base.nodes[i]);
            weights.push_back(hl * base.weights[i]);
        }
    }
    Rule rule;
    rule.nodes = Eigen::Map<Eigen::VectorXd>(nodes.data(), static_cast<Eigen::Index>(nodes.size()));
    rule.weights =
        Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
    return rule;
}

Rule graded_composite(double a, double b, const std::vector<double>& interior,
                      int points_per_panel, int grading_levels, double ratio) {
    if (!(a < b)) throw UsageError("graded_composite: need a < b");
    if (!(ratio > 0.0 && ratio < 1.0))
        throw UsageError("graded_composite: grading ratio must lie in (0, 1)");
    std::vector<double> breaks;
    breaks.push_back(a);
    for (double x : interior)
        if (x > a && x < b && (breaks.empty() || x > breaks.back())) breaks.push_back(x);
    breaks.push_back(b);

    // Refine the first panel toward a: sub-breakpoints a + (x1-a) * ratio^k.
    std::vector<double> graded;
    graded.push_back(a);
    {
        const double len = breaks[1] - a;
        for (int k = grading_levels; k >= 1; --k) graded.push_back(a + len * std::pow(ratio, k));
    }
    for (std::size_t i = 1; i + 1 < breaks.size(); ++i) graded.push_back(breaks[i]);
    // And the last panel toward b.
    {
        const double len = b - breaks[breaks.size() - 2];
        for (int k = 1; k <= grading_levels; ++k) graded.push_back(b - len * std::pow(ratio, k));
    }
    graded.push_back(b);
    return composite(graded, points_per_panel);
}

Rule uniform_composite(double a, double b, int panels, int points_per_panel) {
    if (panels < 1) throw UsageError("uniform_composite: need at least one panel");
    std::vector<double> breaks(static_cast<std::size_t>(panels) + 1);
    for (int i = 0; i <= panels; ++i)
        breaks[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / panels;
    return composite(breaks, points_per_panel);
}

}  // namespace rbflab::quadrature
