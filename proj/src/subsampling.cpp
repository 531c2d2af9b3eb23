#include "rbflab/subsampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "rbflab/errors.hpp"
#include "rbflab/quadrature.hpp"

namespace rbflab::subsampling {

using geometry::Domain;
using geometry::GreedyEngine;
using geometry::PointSet;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Scale below which grid-based fill distances can no longer separate h < q
// decisions from discretization error.
double resolution_floor(const Domain& domain) { return 4.0 * domain.grid_resolution(); }

// Either the domain's cached sequence or a freshly seeded one.
GreedyEngine& engine_for(const Domain& domain, const std::optional<Eigen::VectorXd>& seed,
                         std::unique_ptr<GreedyEngine>& local) {
    if (!seed) return domain.greedy();
    local = std::make_unique<GreedyEngine>(domain, seed);
    return *local;
}

std::size_t thin_prefix_length(const Domain& domain, GreedyEngine& greedy, double q) {
    if (!(q > 0.0)) throw UsageError("thin_prefix: q must be positive");
    if (q <= resolution_floor(domain)) {
        std::ostringstream msg;
        msg << "thin_prefix: q = " << q << " is below the resolution floor "
            << resolution_floor(domain) << " of the candidate grid";
        throw ResolutionError(msg.str());
    }
    std::size_t m = 1;
    greedy.extend_to(1);
    while (greedy.fill_after(m) >= q) {
        if (m + 1 > greedy.capacity())
            throw ResolutionError("thin_prefix: candidate grid exhausted before reaching q");
        greedy.extend_to(m + 1);
        ++m;
    }
    return m;
}

double min_distance_to(const Eigen::MatrixXd& pts, const Eigen::RowVectorXd& p) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < pts.rows(); ++j)
        best = std::min(best, (pts.row(j) - p).norm());
    return best;
}

}  // namespace

PatchCover build_patch_cover(const Domain& domain, std::size_t n,
                             std::optional<Eigen::VectorXd> seed, ExecMode mode) {
    if (n < 1) throw UsageError("build_patch_cover: need at least one patch");
    std::unique_ptr<GreedyEngine> local;
    GreedyEngine& greedy = engine_for(domain, seed, local);
    if (n > greedy.capacity())
        throw UsageError("build_patch_cover: more patches than candidate grid points");
    const Eigen::Index g = domain.candidate_grid().rows();
    if (static_cast<double>(g) / static_cast<double>(n) < 8.0)
        throw ResolutionError("build_patch_cover: fewer than 8 grid cells per patch");
    greedy.extend_to(n);
    PatchCover cover;
    cover.base_points = greedy.prefix(n);
    cover.assignment.assign(static_cast<std::size_t>(g), 0);
    const Eigen::MatrixXd& grid = domain.candidate_grid();
    const Eigen::MatrixXd& base = cover.base_points.points();
#pragma omp parallel for schedule(static) if (mode == ExecMode::parallel)
    for (Eigen::Index i = 0; i < g; ++i) {
        Eigen::Index arg = 0;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < base.rows(); ++j) {
            const double d = (grid.row(i) - base.row(j)).norm();
            if (d < best) {  // strict: ties stay with the lowest index
                best = d;
                arg = j;
            }
        }
        cover.assignment[static_cast<std::size_t>(i)] = arg;
    }
    const double cell = domain.volume() / static_cast<double>(g);
    cover.measures = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < g; ++i)
        cover.measures[cover.assignment[static_cast<std::size_t>(i)]] += cell;
    return cover;
}

double riemann_quadrature(const PatchCover& cover, const DomainFunction& g) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < cover.base_points.size(); ++j)
        acc += std::abs(g(cover.base_points.point(j))) * cover.measures[j];
    return acc;
}

PointSet thin_prefix(const Domain& domain, double q, std::optional<Eigen::VectorXd> seed) {
    std::unique_ptr<GreedyEngine> local;
    GreedyEngine& greedy = engine_for(domain, seed, local);
    return greedy.prefix(thin_prefix_length(domain, greedy, q));
}

PointSet exclude_near(const PointSet& candidates, const PointSet& reference, double q) {
    if (reference.size() == 0) return candidates;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < candidates.size(); ++i) {
        // Open balls: a point at distance exactly q/2 survives.
        if (min_distance_to(reference.points(), candidates.points().row(i)) >= 0.5 * q)
            keep.push_back(i);
    }
    if (keep.empty())
        throw UsageError(
            "exclude_near: no points survive the exclusion; q is too large relative to "
            "the separation of the reference set");
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(keep.size()), candidates.dim());
    for (std::size_t i = 0; i < keep.size(); ++i)
        pts.row(static_cast<Eigen::Index>(i)) = candidates.points().row(keep[i]);
    return PointSet(std::move(pts));
}

double continuous_l2(const Domain& domain, const DomainFunction& g,
                     const std::vector<double>& interior_breaks, ExecMode mode) {
    if (domain.dim() == 1) {
        std::vector<double> breaks = interior_breaks;
        std::sort(breaks.begin(), breaks.end());
        const quadrature::Rule rule = quadrature::graded_composite(
            domain.lower(), domain.upper(), breaks, 16, 40);
        const double value = quadrature::integrate(
            rule,
            [&](double x) {
                Eigen::VectorXd p(1);
                p[0] = x;
                const double v = g(p);
                return v * v;
            },
            mode);
        return std::sqrt(std::max(0.0, value));
    }
    // Grid Riemann sum on non-interval domains.
    const Eigen::MatrixXd& grid = domain.candidate_grid();
    const double cell = domain.volume() / static_cast<double>(grid.rows());
    const double sum = detail::block_sum(
        grid.rows(),
        [&](std::ptrdiff_t i) {
            const double v = g(grid.row(static_cast<Eigen::Index>(i)).transpose());
            return v * v;
        },
        mode);
    return std::sqrt(std::max(0.0, sum * cell));
}

SubsampleResult subsample(const Domain& domain, const DomainFunction& g,
                          const PointSet& y0, double q,
                          std::optional<std::size_t> base_size,
                          std::optional<Eigen::VectorXd> seed, ExecMode mode) {
    const int d = domain.dim();
    const geometry::GeometryConstants gc = geometric_constants(domain);
    const double kappa =
        std::pow(2.0, -1.0 / d) * gc.fill_lower_factor / (2.0 * gc.sep_upper_factor);
    if (y0.size() >= 2) {
        const double q_y0 = geometry::separation_distance(y0);
        if (q > kappa * q_y0) {
            std::ostringstream msg;
            msg << "subsample: q = " << q << " violates q <= 2^(-1/d) c_Omega/(2 C_Omega)"
                << " * q_{Y0} = " << kappa * q_y0;
            throw UsageError(msg.str());
        }
    }
    if (q > 0.4 * domain.cone().radius) {
        std::ostringstream msg;
        msg << "subsample: q = " << q << " violates q <= 2r/5 = "
            << 0.4 * domain.cone().radius;
        throw UsageError(msg.str());
    }

    std::unique_ptr<GreedyEngine> local;
    GreedyEngine& greedy = engine_for(domain, seed, local);
    const std::size_t n_star = thin_prefix_length(domain, greedy, q);

    // Survivors: thinned points not strictly inside B_{q/2} of Y_0.
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < n_star; ++i) {
        const Eigen::VectorXd p = greedy.point(i);
        if (y0.size() == 0 ||
            min_distance_to(y0.points(), p.transpose()) >= 0.5 * q)
            survivors.push_back(i);
    }
    if (survivors.empty())
        throw UsageError(
            "subsample: exclusion removed every thinned point; q is too large relative "
            "to the separation of Y0");

    // Base set Y_N with q_{Y_N} <= 2q/3, found by doubling unless given.
    std::size_t n_base;
    if (base_size) {
        n_base = *base_size;
        if (n_base > greedy.capacity())
            throw UsageError("subsample: base size exceeds the candidate grid");
        greedy.extend_to(n_base);
        if (greedy.separation_after(n_base) > 2.0 * q / 3.0)
            throw UsageError("subsample: base set too small, q_{Y_N} > 2q/3");
    } else {
        n_base = 1;
        while (n_base < n_star) n_base *= 2;
        for (;;) {
            if (n_base > greedy.capacity())
                throw ResolutionError(
                    "subsample: candidate grid exhausted before q_{Y_N} <= 2q/3");
            greedy.extend_to(n_base);
            if (greedy.separation_after(n_base) <= 2.0 * q / 3.0) break;
            n_base *= 2;
        }
    }

    // Clusters T_i: base points within q/3 of each survivor, in greedy
    // discovery order. Survivors are themselves greedy points, so every
    // cluster is nonempty; disjointness comes from q_{Y''} >= q/2.
    const std::size_t n_surv = survivors.size();
    std::vector<std::vector<std::size_t>> clusters(n_surv);
#pragma omp parallel for schedule(static) if (mode == ExecMode::parallel)
    for (std::size_t i = 0; i < n_surv; ++i) {
        const Eigen::VectorXd center = greedy.point(survivors[i]);
        for (std::size_t j = 0; j < n_base; ++j) {
            if ((greedy.point(j) - center).norm() <= q / 3.0)
                clusters[i].push_back(j);
        }
    }
    std::size_t m = std::numeric_limits<std::size_t>::max();
    for (const auto& t : clusters) m = std::min(m, t.size());

    // Slice averages of g^2; argmin, ties to the smallest label.
    Eigen::MatrixXd slice_values(static_cast<Eigen::Index>(n_surv),
                                 static_cast<Eigen::Index>(m));
#pragma omp parallel for schedule(static) if (mode == ExecMode::parallel)
    for (std::size_t i = 0; i < n_surv; ++i)
        for (std::size_t l = 0; l < m; ++l) {
            const double v = g(greedy.point(clusters[i][l]));
            slice_values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) =
                v * v;
        }
    Eigen::Index best_label = 0;
    double best_avg = std::numeric_limits<double>::infinity();
    for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(m); ++l) {
        const double avg = slice_values.col(l).mean();
        if (avg < best_avg) {
            best_avg = avg;
            best_label = l;
        }
    }

    SubsampleResult result;
    result.scale = q;
    result.label = best_label;
    result.cluster_size = static_cast<Eigen::Index>(m);
    result.thin_prefix_size = static_cast<Eigen::Index>(n_star);
    result.survivor_count = static_cast<Eigen::Index>(n_surv);
    result.base_size = static_cast<Eigen::Index>(n_base);
    for (const auto& t : clusters)
        result.cluster_sizes.push_back(static_cast<Eigen::Index>(t.size()));
    result.slice_average = best_avg;
    result.cluster_average = slice_values.mean();

    Eigen::MatrixXd selected(static_cast<Eigen::Index>(n_surv), d);
    for (std::size_t i = 0; i < n_surv; ++i)
        selected.row(static_cast<Eigen::Index>(i)) =
            greedy.point(clusters[i][static_cast<std::size_t>(best_label)]).transpose();
    result.selected = PointSet(std::move(selected));

    result.sep = result.selected.size() >= 2
                     ? geometry::separation_distance(result.selected)
                     : std::numeric_limits<double>::infinity();
    result.fill = geometry::fill_distance(result.selected, domain, mode);
    const PointSet unioned = y0.united(result.selected);
    result.union_sep = unioned.size() >= 2 ? geometry::separation_distance(unioned)
                                           : std::numeric_limits<double>::infinity();

    const double slack = 2.0 * domain.grid_resolution();
    result.sep_lower_ok = result.sep >= q / 3.0 - 1e-12 * q;
    result.fill_upper_ok = result.fill <= 22.0 * q / 3.0 + slack;
    result.union_ok = result.union_sep >= q / 6.0 - 1e-12 * q;

    result.discrete_norm = std::sqrt(best_avg);
    result.continuous_norm = continuous_l2(domain, g, {}, mode);
    result.norm_ratio = result.continuous_norm > 0.0
                            ? result.discrete_norm / result.continuous_norm
                            : (result.discrete_norm > 0.0
                                   ? std::numeric_limits<double>::infinity()
                                   : 0.0);
    result.ratio_bound = std::sqrt(gc.subsample_constant);
    result.ratio_ok = result.norm_ratio <= result.ratio_bound;
    return result;
}

NestedSequenceResult build_nested_sequence(const Domain& domain,
                                           const kernels::RadialKernel& kernel,
                                           const DomainFunction& f, int max_levels,
                                           double h0, ExecMode mode) {
    if (max_levels < 1) throw UsageError("build_nested_sequence: need at least one level");
    if (!(h0 > 0.0)) throw UsageError("build_nested_sequence: h0 must be positive");
    const int d = domain.dim();
    const geometry::GeometryConstants gc = geometric_constants(domain);
    const double kappa =
        std::pow(2.0, -1.0 / d) * gc.fill_lower_factor / (2.0 * gc.sep_upper_factor);
    const double contraction = (3.0 / 22.0) * kappa;

    GreedyEngine& greedy = domain.greedy();
    // X_0: shortest prefix with h < h0 whose separation also satisfies the
    // cone-radius requirement kappa q_{X_0} < 2r/5.
    std::size_t m0 = thin_prefix_length(domain, greedy, h0);
    greedy.extend_to(m0);
    while (kappa * greedy.separation_after(m0) >= 0.4 * domain.cone().radius) {
        if (m0 + 1 > greedy.capacity())
            throw ResolutionError("build_nested_sequence: grid exhausted while seeding X0");
        greedy.extend_to(++m0);
    }

    NestedSequenceResult result;
    result.contraction = contraction;
    result.sets.push_back(greedy.prefix(m0));
    const double q0 = greedy.separation_after(m0);

    for (int level = 0; level < max_levels; ++level) {
        const PointSet& current = result.sets.back();
        const interpolation::Interpolant s =
            interpolation::fit(kernel, current,
                               [&] {
                                   Eigen::VectorXd v(current.size());
                                   for (Eigen::Index i = 0; i < current.size(); ++i)
                                       v[i] = f(current.point(i));
                                   return v;
                               }(),
                               mode);
        const DomainFunction residual = [&f, s](const Eigen::VectorXd& p) {
            return f(p) - interpolation::evaluate_at(s, p);
        };
        std::vector<double> breaks;
        if (d == 1)
            for (Eigen::Index i = 0; i < current.size(); ++i)
                breaks.push_back(current.points()(i, 0));
        const double cont_err = continuous_l2(domain, residual, breaks, mode);

        SequenceLevel row;
        row.level = level;
        row.n_points = current.size();
        row.scale = level == 0 ? q0 : std::pow(contraction, level) * q0;
        row.sep = current.size() >= 2 ? geometry::separation_distance(current)
                                      : std::numeric_limits<double>::infinity();
        row.fill = geometry::fill_distance(current, domain, mode);
        row.cont_err = cont_err;
        row.bound = std::sqrt(gc.subsample_constant);

        const double q_next = std::pow(contraction, level + 1) * q0;
        if (q_next <= resolution_floor(domain)) {
            row.disc_err = kNaN;
            row.ratio = kNaN;
            result.levels.push_back(row);
            result.truncated = true;
            std::ostringstream msg;
            msg << "stopped before level " << level + 1 << ": scale " << q_next
                << " is below the candidate-grid resolution floor "
                << resolution_floor(domain);
            result.warning = msg.str();
            return result;
        }

        SubsampleResult sub =
            subsample(domain, residual, current, q_next, std::nullopt, std::nullopt, mode);
        const PointSet next = current.united(sub.selected);
        // Discrete error on X_{m+1}; s_m matches f on X_m, so only the new
        // points contribute.
        double disc_sq = 0.0;
        for (Eigen::Index i = 0; i < sub.selected.size(); ++i) {
            const double v = residual(sub.selected.point(i));
            disc_sq += v * v;
        }
        row.disc_err = std::sqrt(disc_sq / static_cast<double>(next.size()));
        row.ratio = cont_err > 0.0 ? row.disc_err / cont_err : 0.0;
        result.levels.push_back(row);
        result.sets.push_back(next);
    }
    // Final level row (no subsample beyond it).
    const PointSet& last = result.sets.back();
    SequenceLevel row;
    row.level = max_levels;
    row.n_points = last.size();
    row.scale = std::pow(contraction, max_levels) * q0;
    row.sep = geometry::separation_distance(last);
    row.fill = geometry::fill_distance(last, domain, mode);
    row.disc_err = kNaN;
    const interpolation::Interpolant s =
        interpolation::fit(kernel, last,
                           [&] {
                               Eigen::VectorXd v(last.size());
                               for (Eigen::Index i = 0; i < last.size(); ++i)
                                   v[i] = f(last.point(i));
                               return v;
                           }(),
                           mode);
    std::vector<double> breaks;
    if (d == 1)
        for (Eigen::Index i = 0; i < last.size(); ++i) breaks.push_back(last.points()(i, 0));
    row.cont_err = continuous_l2(
        domain,
        [&](const Eigen::VectorXd& p) { return f(p) - interpolation::evaluate_at(s, p); },
        breaks, mode);
    row.ratio = kNaN;
    row.bound = std::sqrt(gc.subsample_constant);
    result.levels.push_back(row);
    return result;
}

void write_sequence_csv(std::ostream& out, const NestedSequenceResult& result) {
    out << "m,n_points,q,h,disc_err,cont_err,ratio,bound_sqrtC\n";
    char buf[32];
    const auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (const SequenceLevel& row : result.levels) {
        out << row.level << "," << row.n_points << ",";
        put(row.sep);
        out << ",";
        put(row.fill);
        out << ",";
        put(row.disc_err);
        out << ",";
        put(row.cont_err);
        out << ",";
        put(row.ratio);
        out << ",";
        put(row.bound);
        out << "\n";
    }
}

void write_sequence_csv(const std::string& path, const NestedSequenceResult& result) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open '" + path + "' for writing");
    write_sequence_csv(out, result);
}

}  // namespace rbflab::subsampling
