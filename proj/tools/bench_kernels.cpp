// Times the OpenMP kernels against their serial reference implementations:
// Gram assembly, batch interpolant evaluation, greedy distance scans and
// quadrature accumulation.

#include <chrono>
#include <cstdio>
#include <random>

#include "rbflab/exec.hpp"
#include "rbflab/geometry.hpp"
#include "rbflab/interpolation.hpp"
#include "rbflab/kernels.hpp"
#include "rbflab/quadrature.hpp"

using namespace rbflab;
using Clock = std::chrono::steady_clock;

namespace {

template <class F>
double time_ms(F&& body, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        body();
        const auto t1 = Clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

}  // namespace

int main() {
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    const kernels::RadialKernel kernel = kernels::find_kernel("matern-exp");
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    {
        const Eigen::Index n = 2048;
        Eigen::MatrixXd pts(n, 1);
        for (Eigen::Index i = 0; i < n; ++i) pts(i, 0) = unif(rng);
        const double s = time_ms([&] { kernels::assemble_gram(kernel, pts, ExecMode::serial); });
        const double p = time_ms([&] { kernels::assemble_gram(kernel, pts, ExecMode::parallel); });
        report("gram assembly n=2048", s, p);
    }

    {
        const geometry::PointSet centers = geometry::equidistant_points(0.0, 1.0, 1025);
        Eigen::VectorXd coeffs(centers.size());
        for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs[i] = unif(rng) - 0.5;
        Eigen::MatrixXd eval_pts(200000, 1);
        for (Eigen::Index i = 0; i < eval_pts.rows(); ++i) eval_pts(i, 0) = unif(rng);
        const double s = time_ms([&] {
            interpolation::evaluate_multi(kernel, centers, coeffs, eval_pts, ExecMode::serial);
        });
        const double p = time_ms([&] {
            interpolation::evaluate_multi(kernel, centers, coeffs, eval_pts, ExecMode::parallel);
        });
        report("batch evaluate 1025x200k", s, p);
    }

    {
        const geometry::Domain domain = geometry::Domain::interval(0.0, 1.0, 2e-6);
        const geometry::PointSet nodes = geometry::equidistant_points(0.0, 1.0, 4097);
        const double s =
            time_ms([&] { geometry::fill_distance(nodes, domain, ExecMode::serial); });
        const double p =
            time_ms([&] { geometry::fill_distance(nodes, domain, ExecMode::parallel); });
        report("fill distance 4097/524k", s, p);
    }

    {
        const quadrature::Rule rule = quadrature::uniform_composite(0.0, 1.0, 65536, 16);
        const auto f = [](double x) { return std::exp(-x) * x; };
        const double s = time_ms([&] { quadrature::integrate(rule, f, ExecMode::serial); });
        const double p = time_ms([&] { quadrature::integrate(rule, f, ExecMode::parallel); });
        report("quadrature 1M nodes", s, p);
    }

    return 0;
}
