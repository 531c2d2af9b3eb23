#include "rbflab/kernels.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "rbflab/errors.hpp"

namespace rbflab::kernels {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double RadialKernel::fourier_hat(double omega) const {
    if (!has_fourier_hat())
        throw UsageError("kernel '" + name + "' has no closed-form Fourier transform");
    // 1D transform of exp(-r) with the unitary angular-frequency convention.
    return std::sqrt(2.0 / kPi) / (omega * omega + 1.0);
}

double eval_kernel(const RadialKernel& kernel, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
    if (x.size() != y.size()) {
        std::ostringstream msg;
        msg << "eval_kernel: dimension mismatch (" << x.size() << " vs " << y.size() << ")";
        throw UsageError(msg.str());
    }
    return kernel.phi((x - y).norm());
}

namespace detail {

void gram_serial(const RadialKernel& kernel, const Eigen::MatrixXd& points,
                 Eigen::MatrixXd& out) {
    const Eigen::Index n = points.rows();
    const double diag = kernel.phi(0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = diag;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = kernel.phi((points.row(i) - points.row(j)).norm());
            out(i, j) = v;
            out(j, i) = v;
        }
    }
}

void gram_omp(const RadialKernel& kernel, const Eigen::MatrixXd& points,
              Eigen::MatrixXd& out) {
    const Eigen::Index n = points.rows();
    const double diag = kernel.phi(0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = diag;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = kernel.phi((points.row(i) - points.row(j)).norm());
            out(i, j) = v;
            out(j, i) = v;
        }
    }
}

}  // namespace detail

GramMatrix assemble_gram(const RadialKernel& kernel, const Eigen::MatrixXd& points,
                         ExecMode mode) {
    const Eigen::Index n = points.rows();
    if (n == 0) throw UsageError("assemble_gram: empty point set");
    // Reject exact duplicates up front; a duplicate makes the matrix singular.
    {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        const auto lex_less = [&](Eigen::Index a, Eigen::Index b) {
            for (Eigen::Index c = 0; c < points.cols(); ++c) {
                if (points(a, c) != points(b, c)) return points(a, c) < points(b, c);
            }
            return false;
        };
        std::sort(order.begin(), order.end(), lex_less);
        for (std::size_t i = 1; i < order.size(); ++i)
            if (!lex_less(order[i - 1], order[i]) && !lex_less(order[i], order[i - 1])) {
                std::ostringstream msg;
                msg << "assemble_gram: duplicate centers at indices "
                    << std::min(order[i - 1], order[i]) << " and "
                    << std::max(order[i - 1], order[i]);
                throw UsageError(msg.str());
            }
    }
    GramMatrix gram;
    gram.entries.resize(n, n);
    if (mode == ExecMode::parallel)
        detail::gram_omp(kernel, points, gram.entries);
    else
        detail::gram_serial(kernel, points, gram.entries);
    return gram;
}

const std::vector<RadialKernel>& builtin_kernels() {
    static const std::vector<RadialKernel> kernels = [] {
        std::vector<RadialKernel> list;
        RadialKernel matern;
        matern.name = "matern-exp";
        matern.profile = Profile::matern_exp;
        matern.tau = 1.0;
        matern.fourier_lower = std::sqrt(2.0 / kPi);
        matern.fourier_upper = std::sqrt(2.0 / kPi);
        list.push_back(matern);

        RadialKernel w0;
        w0.name = "wendland-c0";
        w0.profile = Profile::wendland_c0;
        w0.tau = 1.0;  // d = 1
        list.push_back(w0);

        RadialKernel w2;
        w2.name = "wendland-c2";
        w2.profile = Profile::wendland_c2;
        w2.tau = 2.0;  // d = 1
        list.push_back(w2);
        return list;
    }();
    return kernels;
}

const RadialKernel& find_kernel(const std::string& name) {
    for (const RadialKernel& k : builtin_kernels())
        if (k.name == name) return k;
    throw UsageError("unknown kernel '" + name + "'");
}

void check_dimension(const RadialKernel& kernel, int dim) {
    if (kernel.tau <= 0.5 * dim) {
        std::ostringstream msg;
        msg << "kernel '" << kernel.name << "' has tau = " << kernel.tau
            << " <= d/2 = " << 0.5 * dim << "; not usable in dimension " << dim;
        throw UsageError(msg.str());
    }
}

double fourier_sandwich_violation(const RadialKernel& kernel,
                                  const std::vector<double>& frequencies) {
    if (!kernel.has_fourier_hat())
        throw UsageError("fourier_sandwich_violation: kernel '" + kernel.name +
                         "' has no closed-form Fourier transform");
    if (!kernel.fourier_lower || !kernel.fourier_upper)
        throw UsageError("fourier_sandwich_violation: kernel '" + kernel.name +
                         "' has unknown Fourier constants");
    double worst = -std::numeric_limits<double>::infinity();
    for (double w : frequencies) {
        const double decay = std::pow(1.0 + w * w, -kernel.tau);
        const double lo = *kernel.fourier_lower * decay;
        const double hi = *kernel.fourier_upper * decay;
        const double value = kernel.fourier_hat(w);
        const double scale = std::max(hi, std::abs(value));
        worst = std::max(worst, (lo - value) / scale);
        worst = std::max(worst, (value - hi) / scale);
    }
    return worst;
}

}  // namespace rbflab::kernels
