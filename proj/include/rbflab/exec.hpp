#pragma once

#include <cstddef>
#include <vector>

namespace rbflab {

// Every data-parallel kernel in the library comes in two flavors: a plain
// serial loop kept as the reference implementation, and an OpenMP variant.
// Tests compare the two, the benchmark tool times them.
enum class ExecMode { serial, parallel };

// Library-wide default used by the high-level entry points.
ExecMode default_exec_mode();
void set_default_exec_mode(ExecMode mode);

// Thread count for OpenMP regions. 0 = leave the runtime default alone.
void set_num_threads(int n);
int num_threads();

namespace detail {

inline constexpr std::ptrdiff_t kSumBlock = 4096;

// Deterministic sum of term(i) over [0, n): partial sums are accumulated
// per fixed-size block and combined in block order, so the result does not
// depend on the number of threads.
template <class F>
double block_sum(std::ptrdiff_t n, F&& term, ExecMode mode) {
    if (n <= 0) return 0.0;
    const std::ptrdiff_t nblocks = (n + kSumBlock - 1) / kSumBlock;
    std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static) if (mode == ExecMode::parallel)
    for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
        const std::ptrdiff_t lo = b * kSumBlock;
        const std::ptrdiff_t hi = lo + kSumBlock < n ? lo + kSumBlock : n;
        double acc = 0.0;
        for (std::ptrdiff_t i = lo; i < hi; ++i) acc += term(i);
        partial[static_cast<std::size_t>(b)] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace detail

}  // namespace rbflab
