#include <doctest.h>

#include <random>
#include <vector>

#include "psplit/kernels.hpp"
#include "test_util.hpp"

using namespace psplit;

TEST_CASE("gemv: OpenMP path is bitwise identical to the serial reference") {
    std::mt19937_64 rng(11);
    for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {3, 7}, {64, 33}, {257, 300}, {40, 1000}}) {
        const auto a = testing::gaussian_vector(rng, rows * cols);
        const auto x = testing::gaussian_vector(rng, cols);
        std::vector<double> ys(rows), yp(rows);
        kernels::serial::gemv(rows, cols, a, x, ys);
        kernels::parallel::gemv(rows, cols, a, x, yp);
        CHECK(ys == yp);

        const auto xt = testing::gaussian_vector(rng, rows);
        std::vector<double> ts(cols), tp(cols);
        kernels::serial::gemv_t(rows, cols, a, xt, ts);
        kernels::parallel::gemv_t(rows, cols, a, xt, tp);
        CHECK(ts == tp);
    }
}

TEST_CASE("dispatching gemv matches serial on both sides of the threshold") {
    std::mt19937_64 rng(5);
    for (std::size_t n : {std::size_t{16}, std::size_t{200}}) {
        const auto a = testing::gaussian_vector(rng, n * n);
        const auto x = testing::gaussian_vector(rng, n);
        std::vector<double> ys(n), yd(n);
        kernels::serial::gemv(n, n, a, x, ys);
        kernels::gemv(n, n, a, x, yd);
        CHECK(ys == yd);
        kernels::serial::gemv_t(n, n, a, x, ys);
        kernels::gemv_t(n, n, a, x, yd);
        CHECK(ys == yd);
    }
}

TEST_CASE("axpy: parallel and serial agree") {
    std::mt19937_64 rng(9);
    const std::size_t n = kernels::parallel_threshold + 17;
    const auto x = testing::gaussian_vector(rng, n);
    auto ys = testing::gaussian_vector(rng, n);
    auto yp = ys;
    kernels::serial::axpy(-0.75, x, ys);
    kernels::parallel::axpy(-0.75, x, yp);
    CHECK(ys == yp);
}

TEST_CASE("small hand-checked products") {
    const std::vector<double> a{1, 2, 0, 1};
    const std::vector<double> x{1, 1};
    std::vector<double> y(2);
    kernels::serial::gemv(2, 2, a, x, y);
    CHECK(y == std::vector<double>{3, 1});
    kernels::serial::gemv_t(2, 2, a, x, y);
    CHECK(y == std::vector<double>{1, 3});
    CHECK(kernels::dot(x, y) == 4.0);
    CHECK(kernels::max_threads() >= 1);
}
