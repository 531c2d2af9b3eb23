#include "rbflab/spectral.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rbflab/errors.hpp"
#include "rbflab/linalg.hpp"

namespace rbflab::spectral {

using geometry::Domain;
using kernels::RadialKernel;

SpectralModel nystrom_decompose_general(std::function<double(double, double)> kernel_fn,
                                        Eigen::Index rank, const quadrature::Rule& rule,
                                        ExecMode mode) {
    if (rank < 1) throw UsageError("nystrom_decompose: rank must be positive");
    if (rule.size() < 4 * rank)
        throw UsageError("nystrom_decompose: quadrature rule needs at least 4*rank nodes");

    const Eigen::Index q = rule.size();
    Eigen::VectorXd sw = rule.weights.cwiseSqrt();
    Eigen::MatrixXd b(q, q);
#pragma omp parallel for schedule(dynamic, 16) if (mode == ExecMode::parallel)
    for (Eigen::Index i = 0; i < q; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = sw[i] * sw[j] * kernel_fn(rule.nodes[i], rule.nodes[j]);
            b(i, j) = v;
            b(j, i) = v;
        }
    }
    linalg::SymEigen eig = linalg::sym_eigen(b);

    SpectralModel model;
    model.kernel_fn = std::move(kernel_fn);
    model.rule = rule;
    model.sqrt_weights = std::move(sw);

    // Ascending from the solver; keep the top `rank`, dropping eigenvalues
    // that are non-positive up to round-off in the leading one.
    const double floor = 1e-14 * std::max(eig.values[q - 1], 0.0);
    Eigen::Index kept = 0;
    for (Eigen::Index j = 0; j < rank; ++j)
        if (eig.values[q - 1 - j] > floor) ++kept;
    if (kept < rank) {
        model.truncated = true;
        std::ostringstream msg;
        msg << "rank truncated from " << rank << " to " << kept
            << ": non-positive computed eigenvalues";
        model.warning = msg.str();
    }
    model.eigenvalues.resize(kept);
    model.basis.resize(q, kept);
    for (Eigen::Index j = 0; j < kept; ++j) {
        model.eigenvalues[j] = eig.values[q - 1 - j];
        Eigen::VectorXd u = eig.vectors.col(q - 1 - j);
        // Sign convention: quadrature-weighted mean of phi_j nonnegative,
        // falling back to a positive leading coefficient on a tie.
        const double mean = model.sqrt_weights.dot(u);
        double sign = 0.0;
        if (std::abs(mean) > 1e-12 * u.norm()) {
            sign = mean > 0.0 ? 1.0 : -1.0;
        } else {
            for (Eigen::Index i = 0; i < q; ++i)
                if (std::abs(u[i]) > 1e-12) {
                    sign = u[i] > 0.0 ? 1.0 : -1.0;
                    break;
                }
            if (sign == 0.0) sign = 1.0;
        }
        model.basis.col(j) = sign * u;
    }
    return model;
}

SpectralModel nystrom_decompose(const RadialKernel& kernel, const Domain& domain,
                                Eigen::Index rank, const quadrature::Rule& rule,
                                ExecMode mode) {
    if (domain.kind() != geometry::DomainKind::interval)
        throw UsageError("nystrom_decompose: implemented for interval domains");
    kernels::check_dimension(kernel, 1);
    return nystrom_decompose_general(
        [kernel](double x, double y) { return kernel.phi(std::abs(x - y)); }, rank, rule,
        mode);
}

SpectralModel nystrom_decompose(const RadialKernel& kernel, const Domain& domain,
                                Eigen::Index rank, ExecMode mode) {
    const Eigen::Index nodes = 4 * rank;
    const int per_panel = 8;
    const int panels = static_cast<int>((nodes + per_panel - 1) / per_panel);
    const quadrature::Rule rule =
        quadrature::uniform_composite(domain.lower(), domain.upper(), panels, per_panel);
    return nystrom_decompose(kernel, domain, rank, rule, mode);
}

Eigen::MatrixXd eigenfunctions_at_nodes(const SpectralModel& model) {
    return model.sqrt_weights.cwiseInverse().asDiagonal() * model.basis;
}

double eval_eigenfunction(const SpectralModel& model, Eigen::Index j, double x) {
    if (j < 0 || j >= model.rank())
        throw UsageError("eval_eigenfunction: index out of range");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < model.rule.size(); ++i)
        acc += model.sqrt_weights[i] * model.basis(i, j) *
               model.kernel_fn(x, model.rule.nodes[i]);
    return acc / model.eigenvalues[j];
}

Eigen::VectorXd coefficients(const SpectralModel& model,
                             const std::function<double(double)>& f) {
    Eigen::VectorXd fw(model.rule.size());
    for (Eigen::Index i = 0; i < model.rule.size(); ++i)
        fw[i] = model.sqrt_weights[i] * f(model.rule.nodes[i]);
    return model.basis.transpose() * fw;
}

double mercer_eval(const SpectralModel& model, double x, double y, Eigen::Index rank) {
    if (rank < 1 || rank > model.rank())
        throw UsageError("mercer_eval: rank out of range");
    double acc = 0.0;
    for (Eigen::Index j = 0; j < rank; ++j)
        acc += model.eigenvalues[j] * eval_eigenfunction(model, j, x) *
               eval_eigenfunction(model, j, y);
    return acc;
}

PowerSpaceNorm power_norm(const SpectralModel& model, const Eigen::VectorXd& coeffs,
                          double theta) {
    if (theta < 0.0) throw UsageError("power_norm: theta must be nonnegative");
    if (coeffs.size() != model.rank())
        throw UsageError("power_norm: coefficient count does not match rank");
    PowerSpaceNorm out;
    out.theta = theta;
    out.truncation_rank = model.rank();
    double total = 0.0;
    double tail = 0.0;
    const Eigen::Index tail_start = model.rank() / 10;
    for (Eigen::Index j = 0; j < model.rank(); ++j) {
        const double term =
            coeffs[j] * coeffs[j] / std::pow(model.eigenvalues[j], theta);
        total += term;
        if (j >= tail_start) tail += term;
    }
    out.value = std::sqrt(total);
    out.tail_estimate = std::sqrt(tail);
    return out;
}

PowerSpaceNorm power_norm(const SpectralModel& model,
                          const std::function<double(double)>& f, double theta) {
    return power_norm(model, coefficients(model, f), theta);
}

std::function<double(double)> finite_rank_function(const SpectralModel& model,
                                                   const Eigen::VectorXd& coeffs) {
    if (coeffs.size() != model.rank())
        throw UsageError("finite_rank_function: coefficient count does not match rank");
    // sum_j c_j phi_j(x) = sum_i v_i k(x, q_i) with v = sqrt(w) . (U (c / lambda)),
    // so each evaluation costs one kernel pass over the quadrature nodes.
    Eigen::VectorXd v = model.sqrt_weights.cwiseProduct(
        model.basis * coeffs.cwiseQuotient(model.eigenvalues));
    Eigen::VectorXd nodes = model.rule.nodes;
    auto kernel_fn = model.kernel_fn;
    return [v = std::move(v), nodes = std::move(nodes), kernel_fn](double x) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < nodes.size(); ++i)
            acc += v[i] * kernel_fn(x, nodes[i]);
        return acc;
    };
}

HolderReport holder_check(const SpectralModel& model, const Eigen::VectorXd& coeffs,
                          double theta1, double theta, double theta2) {
    if (!(theta1 <= theta && theta <= theta2 && theta1 < theta2))
        throw UsageError("holder_check: need theta1 <= theta <= theta2 with theta1 < theta2");
    HolderReport report;
    const double energy = coeffs.squaredNorm();
    if (energy <= 1e-24) {
        report.inconclusive = true;
        return report;
    }
    report.lhs = power_norm(model, coeffs, theta).value;
    report.norm_theta1 = power_norm(model, coeffs, theta1).value;
    report.norm_theta2 = power_norm(model, coeffs, theta2).value;
    const double e1 = (theta2 - theta) / (theta2 - theta1);
    const double e2 = (theta - theta1) / (theta2 - theta1);
    report.rhs = std::pow(report.norm_theta1, e1) * std::pow(report.norm_theta2, e2);
    report.holds = report.lhs <= report.rhs * (1.0 + 1e-6);
    return report;
}

HolderReport holder_check(const SpectralModel& model,
                          const std::function<double(double)>& f, double theta1,
                          double theta, double theta2) {
    const Eigen::VectorXd coeffs = coefficients(model, f);
    // Flag functions whose energy is essentially invisible at the retained rank.
    double f_sq = 0.0;
    for (Eigen::Index i = 0; i < model.rule.size(); ++i) {
        const double v = f(model.rule.nodes[i]);
        f_sq += model.rule.weights[i] * v * v;
    }
    HolderReport report = holder_check(model, coeffs, theta1, theta, theta2);
    if (coeffs.squaredNorm() <= 1e-12 * f_sq) report.inconclusive = true;
    return report;
}

NestedReport nested_power_spaces_check(const SpectralModel& model,
                                       const Eigen::VectorXd& coeffs, double theta_a,
                                       double theta_b) {
    if (!(theta_a <= theta_b))
        throw UsageError("nested_power_spaces_check: need theta_a <= theta_b");
    NestedReport report;
    report.norm_low = power_norm(model, coeffs, theta_a).value;
    report.norm_high = power_norm(model, coeffs, theta_b).value;
    report.factor =
        std::max(1.0, std::pow(model.eigenvalues[0], 0.5 * (theta_b - theta_a)));
    report.holds = report.norm_low <= report.factor * report.norm_high * (1.0 + 1e-10);
    return report;
}

void write_spectrum_csv(std::ostream& out, const SpectralModel& model) {
    out << "j,lambda_j\n";
    char buf[32];
    for (Eigen::Index j = 0; j < model.rank(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", model.eigenvalues[j]);
        out << (j + 1) << "," << buf << "\n";
    }
}

void write_spectrum_csv(const std::string& path, const SpectralModel& model) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open '" + path + "' for writing");
    write_spectrum_csv(out, model);
}

}  // namespace rbflab::spectral
