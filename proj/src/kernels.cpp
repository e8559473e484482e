#include "psplit/kernels.hpp"

#include <cassert>
#include <cstdint>

#ifdef PSPLIT_HAVE_OPENMP
#include <omp.h>
#endif

namespace psplit::kernels {

namespace {

inline double row_dot(const double* row, const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    return s;
}

// Column j of A^T x, i.e. sum_i a(i, j) x(i), summed in increasing i.
inline double col_dot(const double* a, std::size_t rows, std::size_t cols, std::size_t j,
                      const double* x) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += a[i * cols + j] * x[i];
    return s;
}

}  // namespace

namespace serial {

void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y) {
    assert(a.size() == rows * cols && x.size() == cols && y.size() == rows);
    for (std::size_t i = 0; i < rows; ++i) y[i] = row_dot(a.data() + i * cols, x.data(), cols);
}

void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y) {
    assert(a.size() == rows * cols && x.size() == rows && y.size() == cols);
    for (std::size_t j = 0; j < cols; ++j) y[j] = col_dot(a.data(), rows, cols, j, x.data());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace serial

namespace parallel {

void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y) {
    assert(a.size() == rows * cols && x.size() == cols && y.size() == rows);
    const auto n = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(i);
        y[r] = row_dot(a.data() + r * cols, x.data(), cols);
    }
}

void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y) {
    assert(a.size() == rows * cols && x.size() == rows && y.size() == cols);
    const auto n = static_cast<std::int64_t>(cols);
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < n; ++j) {
        const auto c = static_cast<std::size_t>(j);
        y[c] = col_dot(a.data(), rows, cols, c, x.data());
    }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += alpha * x[static_cast<std::size_t>(i)];
}

}  // namespace parallel

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double squared_norm(std::span<const double> x) { return dot(x, x); }

void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y) {
    if (rows * cols >= parallel_threshold)
        parallel::gemv(rows, cols, a, x, y);
    else
        serial::gemv(rows, cols, a, x, y);
}

void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y) {
    if (rows * cols >= parallel_threshold)
        parallel::gemv_t(rows, cols, a, x, y);
    else
        serial::gemv_t(rows, cols, a, x, y);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() >= parallel_threshold)
        parallel::axpy(alpha, x, y);
    else
        serial::axpy(alpha, x, y);
}

int max_threads() {
#ifdef PSPLIT_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace psplit::kernels
