#pragma once

// Reference solvers used to certify the built-in problems. They work on
// Eigen types directly and share nothing with the splitting engine.

#include <Eigen/Dense>

namespace psplit::oracle {

struct LassoSolution {
    Eigen::VectorXd z;
    long iterations = 0;
    double gradient_map_norm = 0.0;
    bool polished = false;
};

/// FISTA on 0.5 ||A z - b||^2 + lambda ||z||_1 until the gradient mapping
/// norm is <= tol, followed by an exact solve on the detected support.
LassoSolution solve_lasso(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double lambda, double tol = 1e-10,
                          long max_iters = 2'000'000);

/// Proximal gradient on 0.5 z^T P z + q^T z + lambda ||z||_1 with P symmetric PD.
Eigen::VectorXd solve_quadratic_l1(const Eigen::MatrixXd& p, const Eigen::VectorXd& q, double lambda,
                                   double tol = 1e-12, long max_iters = 2'000'000);

/// Root of sign(z) sqrt|z| + z = c by bisection down to adjacent doubles.
double signed_sqrt_root(double c);

/// Solves 0 in K z + c + G^T lambda d||.||_1 (G z) for K with positive
/// definite symmetric part, by enumerating the active sets of the dual
/// variable w in [-lambda, lambda]^m. Returns (z, w).
struct ComposedL1Solution {
    Eigen::VectorXd z;
    Eigen::VectorXd w;
    double violation = 0.0;
};
ComposedL1Solution solve_composed_l1(const Eigen::MatrixXd& k, const Eigen::VectorXd& c, const Eigen::MatrixXd& g,
                                     double lambda);

}  // namespace psplit::oracle
