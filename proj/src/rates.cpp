#include "rbflab/rates.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rbflab/errors.hpp"
#include "rbflab/linalg.hpp"
#include "rbflab/quadrature.hpp"

namespace rbflab::rates {

using geometry::Domain;
using geometry::PointSet;
using kernels::RadialKernel;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

quadrature::Rule error_rule(const Domain& domain, const PointSet& nodes,
                            const QuadratureSpec& quad) {
    std::vector<double> interior(static_cast<std::size_t>(nodes.size()));
    for (Eigen::Index i = 0; i < nodes.size(); ++i)
        interior[static_cast<std::size_t>(i)] = nodes.points()(i, 0);
    std::sort(interior.begin(), interior.end());
    return quadrature::graded_composite(domain.lower(), domain.upper(), interior,
                                        quad.points_per_panel, quad.grading_levels,
                                        quad.grading_ratio);
}

PointSet nodes_for(const Domain& domain, NodeRule rule, Eigen::Index n) {
    if (rule == NodeRule::equidistant) {
        if (domain.kind() != geometry::DomainKind::interval)
            throw UsageError("equidistant nodes need an interval domain");
        return geometry::equidistant_points(domain.lower(), domain.upper(), n);
    }
    return geometric_greedy(domain, static_cast<std::size_t>(n)).points;
}

}  // namespace

ScalarFunction f_omega(double omega) {
    if (!(omega > 0.0)) throw UsageError("f_omega: omega must be positive");
    return [omega](double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return std::pow(x, omega) * std::pow(1.0 - x, omega);
    };
}

double l2_omega_error(const RadialKernel& kernel, const Domain& domain,
                      const PointSet& nodes, const ScalarFunction& f,
                      const QuadratureSpec& quad, ExecMode mode) {
    if (domain.kind() != geometry::DomainKind::interval)
        throw UsageError("l2_omega_error: interval domains only");
    Eigen::VectorXd values(nodes.size());
    for (Eigen::Index i = 0; i < nodes.size(); ++i) values[i] = f(nodes.points()(i, 0));
    const interpolation::Interpolant s = interpolation::fit(kernel, nodes, values, mode);
    const quadrature::Rule rule = error_rule(domain, nodes, quad);
    Eigen::MatrixXd pts(rule.size(), 1);
    pts.col(0) = rule.nodes;
    const Eigen::MatrixXd sv =
        interpolation::evaluate_multi(kernel, nodes, s.coeffs, pts, mode);
    const double* w = rule.weights.data();
    const double* x = rule.nodes.data();
    const double* sp = sv.data();
    const double err_sq = detail::block_sum(
        rule.size(),
        [&](std::ptrdiff_t i) {
            const double e = f(x[i]) - sp[i];
            return w[i] * e * e;
        },
        mode);
    return std::sqrt(std::max(0.0, err_sq));
}

std::vector<std::vector<ConvergenceRecord>> run_convergence_study_multi(
    const RadialKernel& kernel, const Domain& domain,
    const std::vector<ScalarFunction>& fs, const std::vector<Eigen::Index>& counts,
    NodeRule rule, const QuadratureSpec& quad, ExecMode mode) {
    if (counts.empty()) throw UsageError("run_convergence_study: empty list of counts");
    for (std::size_t i = 1; i < counts.size(); ++i)
        if (counts[i] <= counts[i - 1])
            throw UsageError("run_convergence_study: counts must increase");
    if (fs.empty()) throw UsageError("run_convergence_study: no target functions");
    if (domain.kind() != geometry::DomainKind::interval)
        throw UsageError("run_convergence_study: interval domains only");

    const std::size_t nf = fs.size();
    std::vector<std::vector<ConvergenceRecord>> out(
        nf, std::vector<ConvergenceRecord>(counts.size()));

    std::vector<PointSet> node_sets;
    node_sets.reserve(counts.size());
    for (Eigen::Index n : counts) node_sets.push_back(nodes_for(domain, rule, n));

    for (std::size_t k = 0; k < counts.size(); ++k) {
        const PointSet& nodes = node_sets[k];
        for (std::size_t fi = 0; fi < nf; ++fi) {
            out[fi][k].n = counts[k];
            out[fi][k].err_l2_next = kNaN;
        }
        try {
            const double fill = geometry::fill_distance(nodes, domain, mode);
            const double sep = geometry::separation_distance(nodes);

            Eigen::MatrixXd values(nodes.size(), static_cast<Eigen::Index>(nf));
            for (Eigen::Index i = 0; i < nodes.size(); ++i) {
                const double x = nodes.points()(i, 0);
                for (std::size_t fi = 0; fi < nf; ++fi)
                    values(i, static_cast<Eigen::Index>(fi)) = fs[fi](x);
            }
            const std::vector<interpolation::Interpolant> fits =
                interpolation::fit_multi(kernel, nodes, values, mode);

            const quadrature::Rule qrule = error_rule(domain, nodes, quad);
            Eigen::MatrixXd pts(qrule.size(), 1);
            pts.col(0) = qrule.nodes;
            Eigen::MatrixXd coeffs(nodes.size(), static_cast<Eigen::Index>(nf));
            for (std::size_t fi = 0; fi < nf; ++fi)
                coeffs.col(static_cast<Eigen::Index>(fi)) = fits[fi].coeffs;
            const Eigen::MatrixXd sv =
                interpolation::evaluate_multi(kernel, nodes, coeffs, pts, mode);

            // Discrete error on the next node set, when nested.
            const bool has_next = k + 1 < counts.size();
            Eigen::MatrixXd next_sv;
            if (has_next)
                next_sv = interpolation::evaluate_multi(kernel, nodes, coeffs,
                                                        node_sets[k + 1].points(), mode);

            for (std::size_t fi = 0; fi < nf; ++fi) {
                ConvergenceRecord& rec = out[fi][k];
                rec.fill = fill;
                rec.sep = sep;
                const double* w = qrule.weights.data();
                const double* x = qrule.nodes.data();
                const double* sp = sv.col(static_cast<Eigen::Index>(fi)).data();
                const double err_sq = detail::block_sum(
                    qrule.size(),
                    [&](std::ptrdiff_t i) {
                        const double e = fs[fi](x[i]) - sp[i];
                        return w[i] * e * e;
                    },
                    mode);
                rec.err_l2_omega = std::sqrt(std::max(0.0, err_sq));
                double sup = 0.0;
                for (Eigen::Index i = 0; i < qrule.size(); ++i)
                    sup = std::max(sup,
                                   std::abs(fs[fi](x[i]) - sv(i, static_cast<Eigen::Index>(fi))));
                rec.err_linf = sup;
                if (has_next) {
                    const PointSet& next = node_sets[k + 1];
                    double acc = 0.0;
                    for (Eigen::Index i = 0; i < next.size(); ++i) {
                        const double e = fs[fi](next.points()(i, 0)) -
                                         next_sv(i, static_cast<Eigen::Index>(fi));
                        acc += e * e;
                    }
                    rec.err_l2_next = std::sqrt(acc / static_cast<double>(next.size()));
                }
            }
        } catch (const std::exception& err) {
            for (std::size_t fi = 0; fi < nf; ++fi) {
                out[fi][k].failed = true;
                out[fi][k].error = err.what();
                out[fi][k].err_l2_omega = kNaN;
                out[fi][k].err_linf = kNaN;
            }
        }
    }
    return out;
}

std::vector<ConvergenceRecord> run_convergence_study(
    const RadialKernel& kernel, const Domain& domain, const ScalarFunction& f,
    const std::vector<Eigen::Index>& counts, NodeRule rule, const QuadratureSpec& quad,
    ExecMode mode) {
    return std::move(
        run_convergence_study_multi(kernel, domain, {f}, counts, rule, quad, mode)
            .front());
}

std::vector<std::vector<double>> uniform_rms_study(
    const RadialKernel& kernel, const Domain& domain,
    const std::vector<ScalarFunction>& fs, const std::vector<Eigen::Index>& counts,
    Eigen::Index eval_points, ExecMode mode) {
    if (domain.kind() != geometry::DomainKind::interval)
        throw UsageError("uniform_rms_error: interval domains only");
    if (eval_points < 2) throw UsageError("uniform_rms_error: need at least two points");
    const std::size_t nf = fs.size();
    Eigen::MatrixXd grid(eval_points, 1);
    for (Eigen::Index i = 0; i < eval_points; ++i)
        grid(i, 0) = domain.lower() + (domain.upper() - domain.lower()) *
                                          static_cast<double>(i) /
                                          static_cast<double>(eval_points - 1);
    std::vector<std::vector<double>> out(nf, std::vector<double>(counts.size()));
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const PointSet nodes =
            geometry::equidistant_points(domain.lower(), domain.upper(), counts[k]);
        Eigen::MatrixXd values(nodes.size(), static_cast<Eigen::Index>(nf));
        for (Eigen::Index i = 0; i < nodes.size(); ++i) {
            const double x = nodes.points()(i, 0);
            for (std::size_t fi = 0; fi < nf; ++fi)
                values(i, static_cast<Eigen::Index>(fi)) = fs[fi](x);
        }
        const std::vector<interpolation::Interpolant> fits =
            interpolation::fit_multi(kernel, nodes, values, mode);
        Eigen::MatrixXd coeffs(nodes.size(), static_cast<Eigen::Index>(nf));
        for (std::size_t fi = 0; fi < nf; ++fi)
            coeffs.col(static_cast<Eigen::Index>(fi)) = fits[fi].coeffs;
        const Eigen::MatrixXd sv =
            interpolation::evaluate_multi(kernel, nodes, coeffs, grid, mode);
        for (std::size_t fi = 0; fi < nf; ++fi) {
            const double* sp = sv.col(static_cast<Eigen::Index>(fi)).data();
            const double acc = detail::block_sum(
                eval_points,
                [&](std::ptrdiff_t i) {
                    const double e = fs[fi](grid(static_cast<Eigen::Index>(i), 0)) - sp[i];
                    return e * e;
                },
                mode);
            out[fi][k] = std::sqrt(acc / static_cast<double>(eval_points));
        }
    }
    return out;
}

double uniform_rms_error(const RadialKernel& kernel, const Domain& domain,
                         const PointSet& nodes, const ScalarFunction& f,
                         Eigen::Index eval_points, ExecMode mode) {
    if (nodes.dim() != 1) throw UsageError("uniform_rms_error: 1D nodes expected");
    Eigen::MatrixXd grid(eval_points, 1);
    for (Eigen::Index i = 0; i < eval_points; ++i)
        grid(i, 0) = domain.lower() + (domain.upper() - domain.lower()) *
                                          static_cast<double>(i) /
                                          static_cast<double>(eval_points - 1);
    Eigen::VectorXd values(nodes.size());
    for (Eigen::Index i = 0; i < nodes.size(); ++i) values[i] = f(nodes.points()(i, 0));
    const interpolation::Interpolant s = interpolation::fit(kernel, nodes, values, mode);
    const Eigen::MatrixXd sv =
        interpolation::evaluate_multi(kernel, nodes, s.coeffs, grid, mode);
    const double acc = detail::block_sum(
        eval_points,
        [&](std::ptrdiff_t i) {
            const double e = f(grid(static_cast<Eigen::Index>(i), 0)) - sv(i, 0);
            return e * e;
        },
        mode);
    return std::sqrt(acc / static_cast<double>(eval_points));
}

RateFit fit_rate_points(const std::vector<double>& fills, const std::vector<double>& errors,
                        Eigen::Index window) {
    if (window < 3) throw UsageError("fit_rate: window must hold at least 3 records");
    if (fills.size() != errors.size())
        throw UsageError("fit_rate: fills and errors must pair up");
    std::vector<std::pair<double, double>> usable;
    for (std::size_t i = 0; i < fills.size(); ++i)
        if (std::isfinite(errors[i]) && errors[i] > 0.0 && fills[i] > 0.0)
            usable.emplace_back(fills[i], errors[i]);
    RateFit fit;
    if (static_cast<Eigen::Index>(usable.size()) < window) {
        if (usable.size() < 3)
            throw UsageError("fit_rate: fewer than 3 usable records");
        std::ostringstream msg;
        msg << "window shrunk from " << window << " to " << usable.size()
            << " usable records";
        fit.warning = msg.str();
        window = static_cast<Eigen::Index>(usable.size());
    }
    const std::size_t start = usable.size() - static_cast<std::size_t>(window);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = start; i < usable.size(); ++i) {
        const double x = std::log(usable[i].first);
        const double y = std::log(usable[i].second);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(window);
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw UsageError("fit_rate: degenerate fill distances");
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    fit.amplitude = std::exp(intercept);
    double res_sq = 0.0;
    for (std::size_t i = start; i < usable.size(); ++i) {
        const double r = std::log(usable[i].second) -
                         (intercept + fit.exponent * std::log(usable[i].first));
        res_sq += r * r;
    }
    fit.residual = std::sqrt(res_sq / n);
    fit.window = window;
    return fit;
}

RateFit fit_rate(const std::vector<ConvergenceRecord>& records, Eigen::Index window) {
    std::vector<double> fills, errors;
    for (const ConvergenceRecord& rec : records) {
        if (rec.failed) continue;
        fills.push_back(rec.fill);
        errors.push_back(rec.err_l2_omega);
    }
    return fit_rate_points(fills, errors, window);
}

SmoothnessVerdict smoothness_verdict(const RateFit& fit, const RadialKernel& kernel) {
    SmoothnessVerdict verdict;
    verdict.theta = fit.exponent / kernel.tau;
    verdict.sobolev_units = verdict.theta * kernel.tau;
    if (!(verdict.theta > 0.0) || !std::isfinite(verdict.theta)) {
        verdict.verdict = "inconclusive";
    } else if (verdict.theta > 1.0) {
        verdict.verdict = "in native space";
    } else {
        verdict.verdict = "in H_theta' for all theta' < theta";
    }
    verdict.caveats.push_back(
        "empirical: rate measured on one node family, not a sup over all point sets");
    if (fit.residual > 0.1) {
        std::ostringstream msg;
        msg << "log-log fit residual " << fit.residual << " exceeds 0.1";
        verdict.caveats.push_back(msg.str());
    }
    if (fit.window < 4) verdict.caveats.push_back("fit window shorter than 4 records");
    if (!fit.warning.empty()) verdict.caveats.push_back(fit.warning);
    return verdict;
}

double default_theta_prime(const RateFit& fit, const RadialKernel& kernel) {
    const double theta = fit.exponent / kernel.tau;
    if (!(theta > 0.0))
        throw UsageError("default_theta_prime: fitted rate does not decay");
    return std::min(0.9 * theta, 1.0);
}

CauchyDiagnostic cauchy_diagnostic(const RadialKernel& kernel, const Domain& domain,
                                   const std::vector<PointSet>& nested_sets,
                                   const ScalarFunction& f, double theta_prime,
                                   const spectral::SpectralModel& model,
                                   const QuadratureSpec& quad, ExecMode mode) {
    if (nested_sets.size() < 2)
        throw UsageError("cauchy_diagnostic: need at least two nested sets");
    if (!(theta_prime > 0.0 && theta_prime <= 1.0))
        throw UsageError("cauchy_diagnostic: theta' must lie in (0, 1]");
    // Verify nesting: every point of X_m must appear in X_{m+1}.
    for (std::size_t m = 0; m + 1 < nested_sets.size(); ++m) {
        const Eigen::MatrixXd& a = nested_sets[m].points();
        const Eigen::MatrixXd& b = nested_sets[m + 1].points();
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            bool found = false;
            for (Eigen::Index j = 0; j < b.rows() && !found; ++j)
                if ((a.row(i) - b.row(j)).norm() == 0.0) found = true;
            if (!found)
                throw UsageError("cauchy_diagnostic: sets are not nested");
        }
    }

    CauchyDiagnostic diag;
    std::vector<interpolation::Interpolant> fits;
    for (std::size_t m = 0; m < nested_sets.size(); ++m) {
        const PointSet& nodes = nested_sets[m];
        Eigen::VectorXd values(nodes.size());
        for (Eigen::Index i = 0; i < nodes.size(); ++i)
            values[i] = f(nodes.points()(i, 0));
        try {
            fits.push_back(interpolation::fit(kernel, nodes, values, mode));
        } catch (const ConditioningError& err) {
            diag.truncated = true;
            diag.warning = err.what();
            break;
        }
    }

    for (std::size_t m = 0; m + 1 < fits.size(); ++m) {
        const interpolation::Interpolant& lo = fits[m];
        const interpolation::Interpolant& hi = fits[m + 1];
        const auto increment = [&](double x) {
            Eigen::VectorXd p(1);
            p[0] = x;
            return interpolation::evaluate_at(hi, p) - interpolation::evaluate_at(lo, p);
        };
        CauchyLevel level;
        level.level = static_cast<int>(m);
        level.increment_norm = spectral::power_norm(model, increment, theta_prime).value;

        const PointSet& next = nested_sets[m + 1];
        const quadrature::Rule rule = error_rule(domain, next, quad);
        level.l2_factor = std::sqrt(std::max(
            0.0, quadrature::integrate(
                     rule, [&](double x) { const double v = increment(x); return v * v; },
                     mode)));

        kernels::GramMatrix gram = kernels::assemble_gram(kernel, next.points(), mode);
        level.inv_norm_factor = 1.0 / linalg::smallest_eigenvalue(gram.entries);
        level.count_factor = static_cast<double>(next.size());

        double disc = 0.0;
        for (Eigen::Index i = 0; i < next.size(); ++i) {
            const double v = increment(next.points()(i, 0));
            disc += v * v;
        }
        level.discrete_factor = std::sqrt(disc / static_cast<double>(next.size()));

        level.bound = std::pow(level.l2_factor, 1.0 - theta_prime) *
                      std::pow(level.inv_norm_factor * level.count_factor,
                               0.5 * theta_prime) *
                      std::pow(level.discrete_factor, theta_prime);
        level.within_bound = level.increment_norm <= level.bound * (1.0 + 1e-6) + 1e-14;
        diag.levels.push_back(level);
    }
    return diag;
}

void write_study_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
    out << "n,h,q,err_l2_omega,err_l2_next,err_linf\n";
    char buf[32];
    const auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (const ConvergenceRecord& rec : records) {
        out << rec.n << ",";
        put(rec.fill);
        out << ",";
        put(rec.sep);
        out << ",";
        put(rec.err_l2_omega);
        out << ",";
        put(rec.err_l2_next);
        out << ",";
        put(rec.err_linf);
        out << "\n";
    }
}

void write_study_csv(const std::string& path, const std::vector<ConvergenceRecord>& records) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open '" + path + "' for writing");
    write_study_csv(out, records);
}

std::string verdict_json(const RateFit& fit, const SmoothnessVerdict& verdict) {
    char buf[32];
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "{\n";
    out << "  \"mu\": " << num(fit.exponent) << ",\n";
    out << "  \"theta\": " << num(verdict.theta) << ",\n";
    out << "  \"verdict\": \"" << verdict.verdict << "\",\n";
    out << "  \"sobolev_units\": " << num(verdict.sobolev_units) << ",\n";
    out << "  \"residual\": " << num(fit.residual) << ",\n";
    out << "  \"caveats\": [";
    for (std::size_t i = 0; i < verdict.caveats.size(); ++i)
        out << (i ? ", " : "") << "\"" << verdict.caveats[i] << "\"";
    out << "]\n}\n";
    return out.str();
}

}  // namespace rbflab::rates
