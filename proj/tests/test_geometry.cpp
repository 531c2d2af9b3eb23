#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "rbflab/errors.hpp"
#include "rbflab/geometry.hpp"

using namespace rbflab;
using geometry::Domain;
using geometry::PointSet;

namespace {

constexpr double kPi = 3.14159265358979323846;

PointSet set1d(std::initializer_list<double> xs) {
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs) pts(i++, 0) = x;
    return PointSet(std::move(pts));
}

Eigen::VectorXd point1d(double x) {
    Eigen::VectorXd p(1);
    p[0] = x;
    return p;
}

}  // namespace

TEST_CASE("separation distance") {
    CHECK(geometry::separation_distance(set1d({0.0, 1.0})) == 0.5);
    CHECK(geometry::separation_distance(set1d({0.0, 0.5, 1.0})) == 0.25);
    CHECK(geometry::separation_distance(geometry::equidistant_points(0, 1, 33)) ==
          doctest::Approx(1.0 / 64).epsilon(1e-15));
    CHECK_THROWS_AS(geometry::separation_distance(set1d({0.3})), UsageError);
}

TEST_CASE("fill distance") {
    const Domain dom = Domain::interval(0.0, 1.0, 1e-3);
    CHECK(geometry::fill_distance(set1d({0.5}), dom) ==
          doctest::Approx(0.5).epsilon(2e-3));
    CHECK(geometry::fill_distance(set1d({0.0, 1.0}), dom) ==
          doctest::Approx(0.5).epsilon(2e-3));
    // power-of-two grid represents the dyadic reference set exactly
    CHECK(geometry::fill_distance(geometry::equidistant_points(0, 1, 33), dom) ==
          doctest::Approx(1.0 / 64).epsilon(1e-12));
    CHECK_THROWS_AS(geometry::fill_distance(PointSet(), dom), UsageError);

    // brute-force oracle over the candidate grid
    const PointSet x = set1d({0.1, 0.42, 0.9});
    CHECK(geometry::fill_distance(x, dom) ==
          doctest::Approx(oracles::fill_brute(x.points(), dom.candidate_grid()))
              .epsilon(1e-14));
}

TEST_CASE("geometric greedy on the interval") {
    const Domain dom = Domain::interval(0.0, 1.0, 1e-3);
    const auto two = geometric_greedy(dom, 2, point1d(0.0));
    CHECK(two.points.points()(0, 0) == 0.0);
    CHECK(two.points.points()(1, 0) == 1.0);

    const auto three = geometric_greedy(dom, 3, point1d(0.0));
    CHECK(three.points.points()(2, 0) == 0.5);

    const auto nine = geometric_greedy(dom, 9, point1d(0.0));
    // brute-force: q from pairwise distances, h over the candidate grid
    const double q_oracle = oracles::separation_brute(nine.points.points());
    const double h_oracle = oracles::fill_brute(nine.points.points(), dom.candidate_grid());
    CHECK(nine.separation[8] == doctest::Approx(q_oracle).epsilon(1e-14));
    CHECK(nine.fill[8] == doctest::Approx(h_oracle).epsilon(1e-14));
    CHECK(q_oracle == doctest::Approx(1.0 / 16).epsilon(1e-12));
    CHECK(h_oracle == doctest::Approx(1.0 / 16).epsilon(1e-12));

    CHECK_THROWS_AS(geometric_greedy(dom, 100000), UsageError);
}

TEST_CASE("greedy sandwich, uniformity and monotonicity") {
    const std::vector<Domain> domains = {
        Domain::interval(0.0, 1.0, 1e-3),
        Domain::box(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), 0.02),
        Domain::unit_disk(0.02),
    };
    for (const Domain& dom : domains) {
        const std::size_t n = 64;
        const auto seq = geometric_greedy(dom, n);
        for (std::size_t m = 2; m <= n; ++m) {
            const double h_prev = seq.fill[m - 2];
            const double h = seq.fill[m - 1];
            const double q = seq.separation[m - 1];
            CHECK(0.5 * h <= 0.5 * h_prev + 1e-12);
            CHECK(0.5 * h_prev <= q + 1e-12);
            CHECK(q <= h + dom.grid_resolution());
            CHECK(h / q <= 2.0 + 2.0 * dom.grid_resolution() / q);
            if (m > 2) CHECK(seq.separation[m - 1] <= seq.separation[m - 2] + 1e-15);
        }
    }
}

TEST_CASE("greedy scaling equivariance") {
    const Domain unit = Domain::interval(0.0, 1.0, 1e-3);
    const Domain scaled = Domain::interval(0.0, 2.0, 2e-3);
    const auto a = geometric_greedy(unit, 17, point1d(0.0));
    const auto b = geometric_greedy(scaled, 17, point1d(0.0));
    for (std::size_t m = 2; m <= 17; ++m) {
        CHECK(b.fill[m - 1] == doctest::Approx(2.0 * a.fill[m - 1]).epsilon(1e-12));
        CHECK(b.separation[m - 1] ==
              doctest::Approx(2.0 * a.separation[m - 1]).epsilon(1e-12));
    }
}

TEST_CASE("geometric constants") {
    const Domain dom = Domain::interval(0.0, 1.0, 1e-3);  // alpha defaults to pi/4
    const auto gc = geometric_constants(dom);
    CHECK(gc.ball_volume == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(gc.cone_volume == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gc.fill_lower_factor == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(gc.sep_upper_factor == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(gc.subsample_constant == doctest::Approx(2048.0).epsilon(1e-12));
    CHECK(gc.sep_upper_factor / gc.fill_lower_factor ==
          doctest::Approx(2.0 * kPi / dom.cone().angle).epsilon(1e-14));

    const Domain disk = Domain::unit_disk(0.02);
    const auto gd = geometric_constants(disk);
    CHECK(gd.ball_volume == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(gd.cone_volume == doctest::Approx(kPi / 4.0).epsilon(1e-12));
    CHECK(gd.fill_lower_factor == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gd.sep_upper_factor ==
          doctest::Approx(std::sqrt(2.0 * kPi / (kPi / 4.0))).epsilon(1e-12));
    CHECK(gd.sep_upper_factor / gd.fill_lower_factor ==
          doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
}

TEST_CASE("geometric bounds report") {
    const Domain dom = Domain::interval(0.0, 1.0, 1e-3);
    const auto report = check_geometric_bounds(geometry::equidistant_points(0, 1, 33), dom);
    CHECK(report.sep_ok);   // 1/64 <= 4/33
    CHECK(report.fill_ok);  // 1/64 >= 0.5/33
    CHECK(report.separation == doctest::Approx(1.0 / 64).epsilon(1e-14));
    CHECK(report.sep_upper == doctest::Approx(4.0 / 33).epsilon(1e-14));
    CHECK(report.fill_lower == doctest::Approx(0.5 / 33).epsilon(1e-14));

    const Domain disk = Domain::unit_disk(0.01);
    const auto greedy65 = geometric_greedy(disk, 65);
    const auto rd = check_geometric_bounds(greedy65.points, disk);
    // recompute both sides directly
    const auto gd = geometric_constants(disk);
    const double n_pow = std::pow(65.0, -0.5);
    CHECK(rd.fill_ok == (rd.fill >= gd.fill_lower_factor * n_pow - disk.grid_resolution()));
    CHECK(rd.sep_ok == (rd.separation <= gd.sep_upper_factor * n_pow));
    CHECK(rd.fill_ok);
    CHECK(rd.sep_ok);
}

TEST_CASE("points CSV round trip") {
    const Domain disk = Domain::unit_disk(0.05);
    const auto seq = geometric_greedy(disk, 17);
    std::stringstream buffer;
    geometry::write_points_csv(buffer, seq.points);
    const PointSet back = geometry::read_points_csv(buffer);
    CHECK(back.dim() == 2);
    REQUIRE(back.size() == seq.points.size());
    CHECK((back.points() - seq.points.points()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("domain basics") {
    const Domain dom = Domain::interval(0.25, 0.75, 1e-3);
    CHECK(dom.volume() == 0.5);
    CHECK(dom.cone().angle == doctest::Approx(kPi / 4));
    CHECK(dom.cone().radius == doctest::Approx(0.125));
    CHECK(dom.contains(point1d(0.3)));
    CHECK(!dom.contains(point1d(0.1)));
    CHECK_THROWS_AS(Domain::interval(1.0, 0.0, 1e-3), UsageError);
    CHECK_THROWS_AS(Domain::interval(0.0, 1.0, 1e-3, geometry::ConeParams{2.0, 0.1}),
                    UsageError);

    const Domain disk = Domain::unit_disk(0.05);
    CHECK(disk.volume() == doctest::Approx(kPi));
    for (Eigen::Index i = 0; i < disk.candidate_grid().rows(); ++i)
        CHECK(disk.candidate_grid().row(i).norm() <= 1.0 + 1e-15);
}
