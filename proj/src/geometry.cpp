#include "rbflab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rbflab/errors.hpp"
#include "rbflab/quadrature.hpp"

namespace rbflab::geometry {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest power of two >= ceil(extent / resolution).
Eigen::Index grid_cells(double extent, double resolution) {
    if (!(resolution > 0.0)) throw UsageError("grid resolution must be positive");
    const double needed = extent / resolution;
    Eigen::Index cells = 1;
    while (static_cast<double>(cells) < needed) {
        cells *= 2;
        if (cells > (Eigen::Index(1) << 26))
            throw ResolutionError("candidate grid would exceed 2^26 cells per axis");
    }
    return cells;
}

ConeParams default_cone(double inradius) { return ConeParams{kPi / 4.0, 0.5 * inradius}; }

void validate_cone(const ConeParams& cone) {
    if (!(cone.angle > 0.0 && cone.angle < kPi / 2.0))
        throw UsageError("cone angle must lie in (0, pi/2)");
    if (!(cone.radius > 0.0)) throw UsageError("cone radius must be positive");
}

double nearest_distance(const Eigen::MatrixXd& pts, const Eigen::RowVectorXd& p) {
    double best = kInf;
    for (Eigen::Index j = 0; j < pts.rows(); ++j)
        best = std::min(best, (pts.row(j) - p).norm());
    return best;
}

}  // namespace

PointSet PointSet::united(const PointSet& other) const {
    if (size() == 0) return other;
    if (other.size() == 0) return *this;
    if (dim() != other.dim()) throw UsageError("PointSet::united: dimension mismatch");
    Eigen::MatrixXd merged(size() + other.size(), dim());
    merged.topRows(size()) = points_;
    merged.bottomRows(other.size()) = other.points_;
    return PointSet(std::move(merged));
}

Domain Domain::interval(double a, double b, double grid_resolution,
                        std::optional<ConeParams> cone) {
    if (!(a < b)) throw UsageError("interval domain needs a < b");
    Domain dom;
    dom.kind_ = DomainKind::interval;
    dom.a_ = a;
    dom.b_ = b;
    dom.lo_ = Eigen::VectorXd::Constant(1, a);
    dom.hi_ = Eigen::VectorXd::Constant(1, b);
    dom.volume_ = b - a;
    dom.cone_ = cone.value_or(default_cone(0.5 * (b - a)));
    validate_cone(dom.cone_);
    const Eigen::Index cells = grid_cells(b - a, grid_resolution);
    dom.resolution_ = (b - a) / static_cast<double>(cells);
    dom.grid_.resize(cells + 1, 1);
    for (Eigen::Index i = 0; i <= cells; ++i)
        dom.grid_(i, 0) = a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
    dom.grid_(cells, 0) = b;
    return dom;
}

Domain Domain::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                   double grid_resolution, std::optional<ConeParams> cone) {
    const int d = static_cast<int>(lo.size());
    if (d == 0 || hi.size() != d) throw UsageError("box domain needs matching bounds");
    if (d == 1) return interval(lo[0], hi[0], grid_resolution, cone);
    double min_extent = kInf;
    double volume = 1.0;
    std::vector<Eigen::Index> cells(static_cast<std::size_t>(d));
    Eigen::Index total = 1;
    for (int c = 0; c < d; ++c) {
        if (!(lo[c] < hi[c])) throw UsageError("box domain needs lo < hi per axis");
        min_extent = std::min(min_extent, hi[c] - lo[c]);
        volume *= hi[c] - lo[c];
        cells[static_cast<std::size_t>(c)] = grid_cells(hi[c] - lo[c], grid_resolution);
        total *= cells[static_cast<std::size_t>(c)] + 1;
        if (total > (Eigen::Index(1) << 26))
            throw ResolutionError("box candidate grid would exceed 2^26 points");
    }
    Domain dom;
    dom.kind_ = DomainKind::box;
    dom.lo_ = lo;
    dom.hi_ = hi;
    dom.volume_ = volume;
    dom.cone_ = cone.value_or(default_cone(0.5 * min_extent));
    validate_cone(dom.cone_);
    dom.resolution_ = 0.0;
    for (int c = 0; c < d; ++c)
        dom.resolution_ = std::max(
            dom.resolution_, (hi[c] - lo[c]) / static_cast<double>(cells[static_cast<std::size_t>(c)]));
    dom.grid_.resize(total, d);
    for (Eigen::Index idx = 0; idx < total; ++idx) {
        Eigen::Index rest = idx;
        for (int c = d - 1; c >= 0; --c) {
            const Eigen::Index nc = cells[static_cast<std::size_t>(c)] + 1;
            const Eigen::Index i = rest % nc;
            rest /= nc;
            dom.grid_(idx, c) =
                lo[c] + (hi[c] - lo[c]) * static_cast<double>(i) /
                            static_cast<double>(cells[static_cast<std::size_t>(c)]);
        }
    }
    return dom;
}

Domain Domain::unit_disk(double grid_resolution, std::optional<ConeParams> cone) {
    Domain dom;
    dom.kind_ = DomainKind::disk;
    dom.lo_ = Eigen::VectorXd::Constant(2, -1.0);
    dom.hi_ = Eigen::VectorXd::Constant(2, 1.0);
    dom.volume_ = kPi;
    dom.cone_ = cone.value_or(default_cone(1.0));
    validate_cone(dom.cone_);
    const Eigen::Index cells = grid_cells(2.0, grid_resolution);
    dom.resolution_ = 2.0 / static_cast<double>(cells);
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(cells) + 1);
    for (Eigen::Index i = 0; i <= cells; ++i)
        xs.push_back(-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(cells));
    std::vector<Eigen::Vector2d> kept;
    for (double x : xs)
        for (double y : xs)
            if (x * x + y * y <= 1.0) kept.emplace_back(x, y);
    dom.grid_.resize(static_cast<Eigen::Index>(kept.size()), 2);
    for (std::size_t i = 0; i < kept.size(); ++i)
        dom.grid_.row(static_cast<Eigen::Index>(i)) = kept[i].transpose();
    return dom;
}

bool Domain::contains(const Eigen::VectorXd& p) const {
    if (p.size() != dim()) return false;
    switch (kind_) {
        case DomainKind::interval:
            return p[0] >= a_ && p[0] <= b_;
        case DomainKind::box:
            return (p.array() >= lo_.array()).all() && (p.array() <= hi_.array()).all();
        case DomainKind::disk:
            return p.squaredNorm() <= 1.0;
    }
    return false;
}

Eigen::VectorXd Domain::centroid() const {
    if (kind_ == DomainKind::disk) return Eigen::VectorXd::Zero(2);
    return 0.5 * (lo_ + hi_);
}

double Domain::diameter() const {
    if (kind_ == DomainKind::disk) return 2.0;
    return (hi_ - lo_).norm();
}

double Domain::lower() const {
    if (kind_ != DomainKind::interval) throw UsageError("Domain::lower: interval only");
    return a_;
}

double Domain::upper() const {
    if (kind_ != DomainKind::interval) throw UsageError("Domain::upper: interval only");
    return b_;
}

GreedyEngine& Domain::greedy() const {
    if (!greedy_) greedy_ = std::make_shared<GreedyEngine>(*this);
    return *greedy_;
}

GreedyEngine::GreedyEngine(const Domain& domain, std::optional<Eigen::VectorXd> seed)
    : grid_(domain.candidate_grid()) {
    const Eigen::Index g = grid_.rows();
    if (g == 0) throw UsageError("GreedyEngine: empty candidate grid");
    Eigen::RowVectorXd start;
    if (seed) {
        if (seed->size() != grid_.cols()) throw UsageError("greedy seed dimension mismatch");
        start = seed->transpose();
    } else {
        start = domain.centroid().transpose();
    }
    // Snap the seed to the grid (lowest index wins ties).
    Eigen::Index best = 0;
    double best_dist = kInf;
    for (Eigen::Index i = 0; i < g; ++i) {
        const double dist = (grid_.row(i) - start).norm();
        if (dist < best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    dist_.assign(static_cast<std::size_t>(g), 0.0);
    const Eigen::RowVectorXd seed_row = grid_.row(best);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < g; ++i)
        dist_[static_cast<std::size_t>(i)] = (grid_.row(i) - seed_row).norm();
    dist_[static_cast<std::size_t>(best)] = 0.0;
    selected_.push_back(best);
    sep_.push_back(kInf);
    fill_.push_back(*std::max_element(dist_.begin(), dist_.end()));
}

std::size_t GreedyEngine::capacity() const { return static_cast<std::size_t>(grid_.rows()); }

void GreedyEngine::select_next() {
    const Eigen::Index g = grid_.rows();
    // Blockwise argmax, combined in block order so ties resolve to the
    // lowest grid index independently of the thread count.
    const Eigen::Index nblocks = (g + detail::kSumBlock - 1) / detail::kSumBlock;
    std::vector<double> block_max(static_cast<std::size_t>(nblocks), -1.0);
    std::vector<Eigen::Index> block_arg(static_cast<std::size_t>(nblocks), 0);
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < nblocks; ++b) {
        const Eigen::Index lo = b * detail::kSumBlock;
        const Eigen::Index hi = std::min<Eigen::Index>(lo + detail::kSumBlock, g);
        double mx = -1.0;
        Eigen::Index arg = lo;
        for (Eigen::Index i = lo; i < hi; ++i) {
            if (dist_[static_cast<std::size_t>(i)] > mx) {
                mx = dist_[static_cast<std::size_t>(i)];
                arg = i;
            }
        }
        block_max[static_cast<std::size_t>(b)] = mx;
        block_arg[static_cast<std::size_t>(b)] = arg;
    }
    double mx = -1.0;
    Eigen::Index arg = 0;
    for (Eigen::Index b = 0; b < nblocks; ++b) {
        if (block_max[static_cast<std::size_t>(b)] > mx) {
            mx = block_max[static_cast<std::size_t>(b)];
            arg = block_arg[static_cast<std::size_t>(b)];
        }
    }
    // The selected point's distance to the prefix is exactly the prefix fill
    // distance, so the running separation updates from the fill value.
    sep_.push_back(std::min(sep_.back(), 0.5 * mx));
    selected_.push_back(arg);
    const Eigen::RowVectorXd row = grid_.row(arg);
    double new_fill = 0.0;
#pragma omp parallel for schedule(static) reduction(max : new_fill)
    for (Eigen::Index i = 0; i < g; ++i) {
        double& di = dist_[static_cast<std::size_t>(i)];
        const double d = (grid_.row(i) - row).norm();
        if (d < di) di = d;
        if (di > new_fill) new_fill = di;
    }
    fill_.push_back(new_fill);
}

void GreedyEngine::extend_to(std::size_t n) {
    if (n > capacity())
        throw UsageError("geometric greedy: requested more points than the candidate grid holds");
    while (selected_.size() < n) select_next();
}

double GreedyEngine::fill_after(std::size_t m) const {
    if (m == 0 || m > fill_.size()) throw UsageError("fill_after: prefix length out of range");
    return fill_[m - 1];
}

double GreedyEngine::separation_after(std::size_t m) const {
    if (m == 0 || m > sep_.size()) throw UsageError("separation_after: prefix length out of range");
    return sep_[m - 1];
}

PointSet GreedyEngine::prefix(std::size_t m) const {
    if (m == 0 || m > selected_.size()) throw UsageError("prefix: length out of range");
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(m), grid_.cols());
    for (std::size_t i = 0; i < m; ++i) pts.row(static_cast<Eigen::Index>(i)) = grid_.row(selected_[i]);
    return PointSet(std::move(pts));
}

Eigen::VectorXd GreedyEngine::point(std::size_t i) const {
    if (i >= selected_.size()) throw UsageError("GreedyEngine::point: index out of range");
    return grid_.row(selected_[i]).transpose();
}

GreedySequence geometric_greedy(const Domain& domain, std::size_t n,
                                std::optional<Eigen::VectorXd> seed) {
    if (n < 1) throw UsageError("geometric_greedy: need n >= 1");
    GreedySequence out;
    if (!seed) {
        GreedyEngine& engine = domain.greedy();
        engine.extend_to(n);
        out.points = engine.prefix(n);
        out.fill.resize(n);
        out.separation.resize(n);
        for (std::size_t m = 1; m <= n; ++m) {
            out.fill[m - 1] = engine.fill_after(m);
            out.separation[m - 1] = engine.separation_after(m);
        }
        return out;
    }
    GreedyEngine engine(domain, seed);
    engine.extend_to(n);
    out.points = engine.prefix(n);
    out.fill.resize(n);
    out.separation.resize(n);
    for (std::size_t m = 1; m <= n; ++m) {
        out.fill[m - 1] = engine.fill_after(m);
        out.separation[m - 1] = engine.separation_after(m);
    }
    return out;
}

double separation_distance(const PointSet& x) {
    const Eigen::Index n = x.size();
    if (n < 2) throw UsageError("separation_distance: need at least two points");
    if (x.separation_cache_) return *x.separation_cache_;
    const Eigen::MatrixXd& pts = x.points();
    double best = kInf;
#pragma omp parallel for schedule(dynamic, 32) reduction(min : best)
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = (pts.row(i) - pts.row(j)).norm();
            if (d < best) best = d;
        }
    x.separation_cache_ = 0.5 * best;
    return 0.5 * best;
}

double fill_distance(const PointSet& x, const Domain& domain, ExecMode mode) {
    if (x.size() == 0) throw UsageError("fill_distance: empty point set");
    const Eigen::MatrixXd& grid = domain.candidate_grid();
    const Eigen::MatrixXd& pts = x.points();
    const Eigen::Index g = grid.rows();
    double worst = 0.0;
    if (x.dim() == 1) {
        // Sorted scan: nearest neighbor by binary search per grid point.
        std::vector<double> xs(static_cast<std::size_t>(pts.rows()));
        for (Eigen::Index i = 0; i < pts.rows(); ++i) xs[static_cast<std::size_t>(i)] = pts(i, 0);
        std::sort(xs.begin(), xs.end());
#pragma omp parallel for schedule(static) reduction(max : worst) if (mode == ExecMode::parallel)
        for (Eigen::Index i = 0; i < g; ++i) {
            const double p = grid(i, 0);
            auto it = std::lower_bound(xs.begin(), xs.end(), p);
            double d = kInf;
            if (it != xs.end()) d = std::min(d, *it - p);
            if (it != xs.begin()) d = std::min(d, p - *(it - 1));
            if (d > worst) worst = d;
        }
        return worst;
    }
#pragma omp parallel for schedule(static) reduction(max : worst) if (mode == ExecMode::parallel)
    for (Eigen::Index i = 0; i < g; ++i) {
        const double d = nearest_distance(pts, grid.row(i));
        if (d > worst) worst = d;
    }
    return worst;
}

double uniformity(const PointSet& x, const Domain& domain) {
    return fill_distance(x, domain) / separation_distance(x);
}

GeometryConstants geometric_constants(const Domain& domain) {
    const int d = domain.dim();
    const double alpha = domain.cone().angle;
    GeometryConstants gc;
    gc.ball_volume = std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
    if (d == 1) {
        gc.cone_volume = 1.0;
    } else {
        // Unit cone = (1/d) * area of the spherical cap of angular radius alpha.
        const double sphere = 2.0 * std::pow(kPi, 0.5 * (d - 1)) / std::tgamma(0.5 * (d - 1));
        const auto rule = quadrature::uniform_composite(0.0, alpha, 8, 16);
        const double cap_integral = quadrature::integrate(
            rule, [&](double t) { return std::pow(std::sin(t), d - 2); }, ExecMode::serial);
        gc.cone_volume = sphere * cap_integral / static_cast<double>(d);
    }
    const double gamma = std::tgamma(0.5 * d + 1.0);
    gc.fill_lower_factor = std::pow(domain.volume() * gamma, 1.0 / d) / std::sqrt(kPi);
    gc.sep_upper_factor = std::pow(2.0 * kPi / alpha, 1.0 / d) * gc.fill_lower_factor;
    gc.subsample_constant = 4.0 * std::pow(16.0, d) * gc.ball_volume *
                            std::pow(gc.sep_upper_factor, d) /
                            (std::pow(gc.fill_lower_factor, 2.0 * d) *
                             gc.cone_volume * gc.cone_volume);
    return gc;
}

GeometricBoundsReport check_geometric_bounds(const PointSet& x, const Domain& domain) {
    if (x.size() < 2) throw UsageError("check_geometric_bounds: need at least two points");
    const GeometryConstants gc = geometric_constants(domain);
    const double n_pow = std::pow(static_cast<double>(x.size()), -1.0 / domain.dim());
    GeometricBoundsReport report;
    report.fill = fill_distance(x, domain);
    report.separation = separation_distance(x);
    report.fill_lower = gc.fill_lower_factor * n_pow;
    report.sep_upper = gc.sep_upper_factor * n_pow;
    report.fill_ok = report.fill >= report.fill_lower - domain.grid_resolution();
    report.sep_ok = report.separation <= report.sep_upper;
    return report;
}

PointSet equidistant_points(double a, double b, Eigen::Index n) {
    if (n < 1) throw UsageError("equidistant_points: need n >= 1");
    Eigen::MatrixXd pts(n, 1);
    if (n == 1) {
        pts(0, 0) = 0.5 * (a + b);
    } else {
        for (Eigen::Index i = 0; i < n; ++i)
            pts(i, 0) = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
        pts(n - 1, 0) = b;
    }
    return PointSet(std::move(pts));
}

void write_points_csv(std::ostream& out, const PointSet& x) {
    out << "# dim=" << x.dim() << "\n";
    char buf[32];
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        for (int c = 0; c < x.dim(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", x.points()(i, c));
            out << (c ? "," : "") << buf;
        }
        out << "\n";
    }
}

void write_points_csv(const std::string& path, const PointSet& x) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open '" + path + "' for writing");
    write_points_csv(out, x);
}

PointSet read_points_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw UsageError("points CSV: missing header");
    int dim = 0;
    if (std::sscanf(line.c_str(), "# dim=%d", &dim) != 1 || dim < 1)
        throw UsageError("points CSV: bad header '" + line + "'");
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        int c = 0;
        while (std::getline(ls, cell, ',')) {
            values.push_back(std::stod(cell));
            ++c;
        }
        if (c != dim) throw UsageError("points CSV: row with wrong arity");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(values.size()) / dim;
    Eigen::MatrixXd pts(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int c = 0; c < dim; ++c) pts(i, c) = values[static_cast<std::size_t>(i * dim + c)];
    return PointSet(std::move(pts));
}

PointSet read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "' for reading");
    return read_points_csv(in);
}

}  // namespace rbflab::geometry
