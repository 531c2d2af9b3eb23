// Test-only reference implementations, deliberately independent of the
// library's linear algebra and distance paths.
#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

namespace oracles {

// Cyclic Jacobi eigensolver; returns eigenvalues ascending.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
    const int n = static_cast<int>(a.rows());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = 0.5 * (a(q, q) - a(p, p)) / a(p, q);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Half the minimal pairwise distance, plain double loop.
inline double separation_brute(const Eigen::MatrixXd& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
        for (Eigen::Index j = i + 1; j < pts.rows(); ++j)
            best = std::min(best, (pts.row(i) - pts.row(j)).norm());
    return 0.5 * best;
}

// Fill distance measured over an explicit reference cloud.
inline double fill_brute(const Eigen::MatrixXd& pts, const Eigen::MatrixXd& cloud) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < cloud.rows(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < pts.rows(); ++j)
            nearest = std::min(nearest, (cloud.row(i) - pts.row(j)).norm());
        worst = std::max(worst, nearest);
    }
    return worst;
}

// alpha^T A alpha by an explicit double loop over kernel evaluations.
template <class Phi>
double quadratic_form_brute(const Eigen::MatrixXd& pts, const Eigen::VectorXd& alpha,
                            Phi&& phi) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
        for (Eigen::Index j = 0; j < pts.rows(); ++j)
            acc += alpha[i] * alpha[j] * phi((pts.row(i) - pts.row(j)).norm());
    return acc;
}

// Eigenvalues of the exp(-|x-y|) integral operator on [0,1]: lambda =
// 2/(1+w^2) with w running through the even family w tan(w/2) = 1 and the
// odd family tan(w/2) = -w, interleaved and decreasing in lambda.
inline double exp_kernel_eigenvalue_exact(int index) {
    auto bisect = [](auto f, double lo, double hi) {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (f(lo) * f(mid) <= 0)
                hi = mid;
            else
                lo = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double pi = 3.14159265358979323846;
    // Roots interleave: w_k lives in ((k-1) pi, k pi), alternating families.
    const int k = index + 1;
    double w;
    if (k % 2 == 1) {
        // even family: w tan(w/2) - 1 has its k-th root here
        w = bisect([](double v) { return v * std::tan(0.5 * v) - 1.0; },
                   (k - 1) * pi + 1e-9, k * pi - 1e-9);
    } else {
        w = bisect([](double v) { return std::tan(0.5 * v) + v; }, (k - 1) * pi + 1e-9,
                   k * pi - 1e-9);
    }
    return 2.0 / (1.0 + w * w);
}

}  // namespace oracles
