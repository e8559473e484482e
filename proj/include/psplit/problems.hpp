#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psplit/problem.hpp"

namespace psplit {

/// A point of the extended solution set computed by an independent solver.
struct ReferenceSolution {
    Vec z_star{0.0};
    std::vector<Vec> w_star;
    std::string provenance;
    double accuracy = 0.0;

    PrimalDualPoint point() const { return {z_star, w_star}; }
};

struct ProblemInstance {
    ProblemSpec spec;
    ReferenceSolution reference;
    std::uint64_t seed = 0;
};

/// Largest violation of w_i in T_i(G_i z) and -sum G_i^* w_i in T_n(z).
/// Forward blocks use ||T_i(G_i z) - w_i||; backward blocks use the
/// resolvent characterization ||G_i z - prox_{T_i}(G_i z + w_i)||.
double kkt_residual(const ProblemSpec& spec, const Vec& z, const std::vector<Vec>& w);

/// min 0.5 ||A z - b||^2 + lambda ||z||_1 as T_1(u) = u - b (forward, G_1 = A)
/// plus T_2 = lambda d||.||_1 (backward).
ProblemInstance make_lasso(const Matrix& a, const Vec& b, double lambda);

struct RandomLassoOptions {
    std::size_t rows = 20;
    std::size_t cols = 50;
    std::size_t nonzeros = 5;
    double noise = 0.01;
    /// lambda = lambda_ratio * ||A^T b||_inf
    double lambda_ratio = 0.1;
};
ProblemInstance make_random_lasso(std::uint64_t seed, const RandomLassoOptions& opts = {});

/// T_1(x) = x^3 - c (forward, G_1 = I), T_2 = normal cone of [l, u] (backward).
ProblemInstance make_box_cubic(const Vec& c, const Vec& lower, const Vec& upper);

/// T_1(x) = sign(x) sqrt|x| + x - c (forward, G_1 = I), T_2 = 0 (backward).
ProblemInstance make_signed_sqrt(const Vec& c);

struct SkewComposedOptions {
    std::size_t dim = 6;  // H_0
    std::size_t m1 = 5;   // H_1
    std::size_t m2 = 4;   // H_2
    double lambda = 0.5;
    double skew_scale = 1.0;
    double shift_scale = 1.0;
    /// Use G_1 = G_2 = I (requires m1 = m2 = dim).
    bool identity_maps = false;
};

/// n = 3: T_1(u) = S u + b_1 with S skew (forward, dense G_1);
/// T_2 = lambda d||.||_1 (backward, dense G_2); T_3(z) = P z + b_3 with P
/// positive definite (backward). The oracle enumerates active sets of the
/// dual box problem, so m2 is capped at 10.
ProblemInstance make_skew_composed(std::uint64_t seed, const SkewComposedOptions& opts = {});

/// Names accepted by make_builtin.
std::vector<std::string> builtin_problem_names();
/// Default instance of a built-in problem family.
ProblemInstance make_builtin(const std::string& name, std::uint64_t seed);

/// Starts the instance at its reference KKT point.
void start_at_reference(ProblemInstance& inst);

}  // namespace psplit
