#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rbflab/exec.hpp"

namespace rbflab::geometry {

// Interior cone condition parameters (angle in (0, pi/2), radius > 0).
struct ConeParams {
    double angle;
    double radius;
};

enum class DomainKind { interval, box, disk };

// An ordered set of pairwise-distinct points, one per row. The separation
// distance is cached on first use (write-once; do not share a PointSet
// across threads before its first stats query).
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(Eigen::MatrixXd points) : points_(std::move(points)) {}
    PointSet(const PointSet& other) : points_(other.points_) {}
    PointSet& operator=(const PointSet& other) {
        points_ = other.points_;
        separation_cache_.reset();
        return *this;
    }
    PointSet(PointSet&&) = default;
    PointSet& operator=(PointSet&&) = default;

    Eigen::Index size() const { return points_.rows(); }
    int dim() const { return static_cast<int>(points_.cols()); }
    const Eigen::MatrixXd& points() const { return points_; }
    Eigen::VectorXd point(Eigen::Index i) const { return points_.row(i).transpose(); }

    // Concatenation preserving order (`other` appended).
    PointSet united(const PointSet& other) const;

private:
    friend double separation_distance(const PointSet&);
    Eigen::MatrixXd points_;
    mutable std::optional<double> separation_cache_;
};

class GreedyEngine;

// Bounded domain discretized by a candidate grid that stands in for the
// continuum in every sup-type computation (fill distance, greedy argmax).
// 1D grids contain both endpoints exactly and use power-of-two cell counts
// so dyadic reference sets are representable without grid error.
class Domain {
public:
    static Domain interval(double a, double b, double grid_resolution,
                           std::optional<ConeParams> cone = std::nullopt);
    static Domain box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                      double grid_resolution, std::optional<ConeParams> cone = std::nullopt);
    static Domain unit_disk(double grid_resolution,
                            std::optional<ConeParams> cone = std::nullopt);

    int dim() const { return static_cast<int>(grid_.cols()); }
    DomainKind kind() const { return kind_; }
    double volume() const { return volume_; }
    const ConeParams& cone() const { return cone_; }
    double grid_resolution() const { return resolution_; }
    const Eigen::MatrixXd& candidate_grid() const { return grid_; }
    bool contains(const Eigen::VectorXd& p) const;
    Eigen::VectorXd centroid() const;
    double diameter() const;

    // Interval bounds; throws for other kinds.
    double lower() const;
    double upper() const;

    // THE geometric greedy sequence of this domain (seeded at the grid point
    // closest to the centroid), extended lazily and shared across copies.
    GreedyEngine& greedy() const;

private:
    Domain() = default;

    DomainKind kind_ = DomainKind::interval;
    double a_ = 0.0, b_ = 1.0;  // interval bounds / box handled via lo_, hi_
    Eigen::VectorXd lo_, hi_;
    double volume_ = 1.0;
    double resolution_ = 0.0;
    ConeParams cone_{0.0, 0.0};
    Eigen::MatrixXd grid_;
    mutable std::shared_ptr<GreedyEngine> greedy_;
};

// Incremental farthest-point sampler over a domain's candidate grid.
// Selection state persists, so prefixes of any length share the work.
// Argmax ties break toward the lowest grid index.
class GreedyEngine {
public:
    GreedyEngine(const Domain& domain, std::optional<Eigen::VectorXd> seed = std::nullopt);

    void extend_to(std::size_t n);
    std::size_t size() const { return selected_.size(); }
    std::size_t capacity() const;  // candidate grid size

    // Fill distance of the m-point prefix, measured on the candidate grid.
    double fill_after(std::size_t m) const;
    // Separation distance of the m-point prefix (infinity for m = 1).
    double separation_after(std::size_t m) const;
    PointSet prefix(std::size_t m) const;
    Eigen::VectorXd point(std::size_t i) const;

private:
    void select_next();

    const Eigen::MatrixXd grid_;
    std::vector<double> dist_;    // distance of each grid point to the prefix
    std::vector<Eigen::Index> selected_;
    std::vector<double> fill_;    // fill_[m-1] = h of the m-prefix
    std::vector<double> sep_;     // sep_[m-1] = q of the m-prefix
};

// Snapshot of a greedy run of length n.
struct GreedySequence {
    PointSet points;
    std::vector<double> fill;        // fill[m-1] = h of the m-prefix
    std::vector<double> separation;  // separation[m-1] = q of the m-prefix
};

// Farthest-point sampling; uses the domain's cached sequence when no seed is
// given. Throws UsageError if n exceeds the candidate grid size.
GreedySequence geometric_greedy(const Domain& domain, std::size_t n,
                                std::optional<Eigen::VectorXd> seed = std::nullopt);

// Half the minimal pairwise distance. Throws UsageError for |X| < 2.
double separation_distance(const PointSet& x);

// Largest grid-point distance to the nearest point of X; a lower bound on
// the true fill distance accurate to the grid resolution. Throws UsageError
// for empty X.
double fill_distance(const PointSet& x, const Domain& domain,
                     ExecMode mode = default_exec_mode());

double uniformity(const PointSet& x, const Domain& domain);

// Explicit constants of the geometric bounds and of the subsampling theorem.
struct GeometryConstants {
    double ball_volume;         // volume of the unit ball, C_d
    double cone_volume;         // volume of the unit cone of angle alpha
    double fill_lower_factor;   // c_Omega:  h >= c_Omega n^{-1/d}
    double sep_upper_factor;    // C_Omega:  q <= C_Omega n^{-1/d}
    double subsample_constant;  // 4 * 16^d C_d C_Omega^d / (c_Omega^{2d} cone_volume^2)
};
GeometryConstants geometric_constants(const Domain& domain);

struct GeometricBoundsReport {
    double fill = 0.0;
    double separation = 0.0;
    double fill_lower = 0.0;   // c_Omega n^{-1/d}
    double sep_upper = 0.0;    // C_Omega n^{-1/d}
    bool fill_ok = false;      // fill >= fill_lower, within grid slack
    bool sep_ok = false;       // separation <= sep_upper
};
GeometricBoundsReport check_geometric_bounds(const PointSet& x, const Domain& domain);

// n equidistant points on [a, b] including both endpoints.
PointSet equidistant_points(double a, double b, Eigen::Index n);

// CSV with one point per row, columns x1..xd, preceded by "# dim=d".
void write_points_csv(std::ostream& out, const PointSet& x);
void write_points_csv(const std::string& path, const PointSet& x);
PointSet read_points_csv(std::istream& in);
PointSet read_points_csv(const std::string& path);

}  // namespace rbflab::geometry
