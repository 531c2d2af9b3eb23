#include "rbflab/interpolation.hpp"

#include <cmath>

#include "rbflab/errors.hpp"

namespace rbflab::interpolation {

using geometry::PointSet;
using kernels::RadialKernel;

namespace {

// s(p) for one point, all coefficient columns at once.
Eigen::RowVectorXd eval_point(const RadialKernel& kernel, const Eigen::MatrixXd& centers,
                              const Eigen::MatrixXd& coeffs, const Eigen::RowVectorXd& p) {
    Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(coeffs.cols());
    for (Eigen::Index j = 0; j < centers.rows(); ++j) {
        const double k = kernel.phi((centers.row(j) - p).norm());
        out += k * coeffs.row(j);
    }
    return out;
}

}  // namespace

std::vector<Interpolant> fit_multi(const RadialKernel& kernel, const PointSet& centers,
                                   const Eigen::MatrixXd& values, ExecMode mode) {
    if (values.rows() != centers.size())
        throw UsageError("fit: need one value per center");
    kernels::check_dimension(kernel, centers.dim());
    kernels::GramMatrix gram = kernels::assemble_gram(kernel, centers.points(), mode);
    Eigen::MatrixXd coeffs;
    linalg::FactorizationReport report;
    try {
        linalg::SpdSolver solver(std::move(gram.entries));
        coeffs = solver.solve(values);
        report = solver.report();
    } catch (ConditioningError& err) {
        err.separation = centers.size() >= 2 ? geometry::separation_distance(centers) : 0.0;
        throw;
    }
    // Nodal residual via fresh kernel sums, not the (already released) matrix.
    Eigen::MatrixXd at_nodes =
        evaluate_multi(kernel, centers, coeffs, centers.points(), mode);
    std::vector<Interpolant> out;
    out.reserve(static_cast<std::size_t>(values.cols()));
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
        Interpolant s;
        s.kernel = kernel;
        s.centers = centers;
        s.coeffs = coeffs.col(c);
        s.residual_at_nodes = (at_nodes.col(c) - values.col(c)).cwiseAbs().maxCoeff();
        s.factorization = report;
        out.push_back(std::move(s));
    }
    return out;
}

Interpolant fit(const RadialKernel& kernel, const PointSet& centers,
                const Eigen::VectorXd& values, ExecMode mode) {
    return std::move(fit_multi(kernel, centers, values, mode).front());
}

Eigen::MatrixXd evaluate_multi(const RadialKernel& kernel, const PointSet& centers,
                               const Eigen::MatrixXd& coeffs, const Eigen::MatrixXd& pts,
                               ExecMode mode) {
    if (pts.cols() != centers.dim())
        throw UsageError("evaluate: point dimension does not match centers");
    Eigen::MatrixXd out(pts.rows(), coeffs.cols());
    const Eigen::MatrixXd& c = centers.points();
    if (mode == ExecMode::parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index i = 0; i < pts.rows(); ++i)
            out.row(i) = eval_point(kernel, c, coeffs, pts.row(i));
    } else {
        for (Eigen::Index i = 0; i < pts.rows(); ++i)
            out.row(i) = eval_point(kernel, c, coeffs, pts.row(i));
    }
    return out;
}

Eigen::VectorXd evaluate(const Interpolant& s, const PointSet& pts, ExecMode mode) {
    return evaluate_multi(s.kernel, s.centers, s.coeffs, pts.points(), mode).col(0);
}

double evaluate_at(const Interpolant& s, const Eigen::VectorXd& p) {
    double acc = 0.0;
    const Eigen::MatrixXd& c = s.centers.points();
    const Eigen::RowVectorXd row = p.transpose();
    for (Eigen::Index j = 0; j < c.rows(); ++j)
        acc += s.coeffs[j] * s.kernel.phi((c.row(j) - row).norm());
    return acc;
}

PowerFunctionResult power_function(const RadialKernel& kernel, const PointSet& centers,
                                   const PointSet& pts, ExecMode mode) {
    PowerFunctionResult result;
    result.values.resize(pts.size());
    if (centers.size() == 0) {
        for (Eigen::Index i = 0; i < pts.size(); ++i)
            result.values[i] = std::sqrt(kernel.phi(0.0));
        return result;
    }
    kernels::GramMatrix gram = kernels::assemble_gram(kernel, centers.points(), mode);
    linalg::SpdSolver solver(std::move(gram.entries));
    const Eigen::MatrixXd& c = centers.points();
    const double diag = kernel.phi(0.0);
    double most_negative = 0.0;
#pragma omp parallel for schedule(static) reduction(min : most_negative) \
    if (mode == ExecMode::parallel)
    for (Eigen::Index i = 0; i < pts.size(); ++i) {
        Eigen::VectorXd b(c.rows());
        for (Eigen::Index j = 0; j < c.rows(); ++j)
            b[j] = kernel.phi((c.row(j) - pts.points().row(i)).norm());
        const double p2 = diag - solver.inverse_quadratic_form(b);
        if (p2 < most_negative) most_negative = p2;
        result.values[i] = p2 > 0.0 ? std::sqrt(p2) : 0.0;
    }
    result.most_negative = most_negative;
    return result;
}

MinEigReport min_eig_lower_bound_check(const RadialKernel& kernel, const PointSet& centers,
                                       ExecMode mode) {
    if (centers.size() < 2)
        throw UsageError("min_eig_lower_bound_check: need at least two points");
    kernels::GramMatrix gram = kernels::assemble_gram(kernel, centers.points(), mode);
    MinEigReport report;
    report.min_eig = linalg::smallest_eigenvalue(gram.entries);
    report.separation = geometry::separation_distance(centers);
    report.separation_power =
        std::pow(report.separation, 2.0 * kernel.tau - centers.dim());
    report.ratio = report.min_eig / report.separation_power;
    return report;
}

double native_norm_squared(const Interpolant& s, ExecMode mode) {
    const Eigen::MatrixXd& c = s.centers.points();
    const Eigen::VectorXd& a = s.coeffs;
    const Eigen::Index n = c.rows();
    return detail::block_sum(
        n,
        [&](std::ptrdiff_t i) {
            double row = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
                row += a[j] * s.kernel.phi((c.row(i) - c.row(j)).norm());
            return a[i] * row;
        },
        mode);
}

NativeNormReport native_norm_bound(const Interpolant& s, ExecMode mode) {
    NativeNormReport report;
    const Eigen::Index n = s.centers.size();
    report.native_sq = native_norm_squared(s, mode);
    kernels::GramMatrix gram = kernels::assemble_gram(s.kernel, s.centers.points(), mode);
    const Eigen::VectorXd at_nodes = gram.entries.selfadjointView<Eigen::Lower>() * s.coeffs;
    report.discrete_sq = at_nodes.squaredNorm() / static_cast<double>(n);
    report.inverse_norm = 1.0 / linalg::smallest_eigenvalue(gram.entries);
    report.bound = report.inverse_norm * static_cast<double>(n) * report.discrete_sq;
    report.holds = report.native_sq <= report.bound * (1.0 + 1e-8);
    return report;
}

}  // namespace rbflab::interpolation
