#pragma once

#include <cstddef>
#include <span>

// Dense level-1/level-2 kernels.
//
// Every kernel computes each output entry with a fixed serial summation
// order, so the OpenMP variants are bitwise identical to the serial ones
// regardless of thread count. Inner products stay serial for the same reason.

namespace psplit::kernels {

namespace serial {

// y = A x, A row-major rows x cols.
void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y);

// y = A^T x.
void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace serial

namespace parallel {

void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y);
void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace parallel

double dot(std::span<const double> x, std::span<const double> y);
double squared_norm(std::span<const double> x);

/// Matrices with at least this many entries go through the OpenMP kernels.
inline constexpr std::size_t parallel_threshold = std::size_t{1} << 15;

// Dispatching entry points used by the rest of the library.
void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y);
void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// Number of threads the OpenMP runtime would use, 1 without OpenMP.
int max_threads();

}  // namespace psplit::kernels
