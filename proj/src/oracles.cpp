#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace psplit::oracle {

namespace {

Eigen::VectorXd soft(const Eigen::VectorXd& v, double t) {
    return v.unaryExpr([t](double x) { return x > t ? x - t : (x < -t ? x + t : 0.0); });
}

}  // namespace

LassoSolution solve_lasso(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double lambda, double tol,
                          long max_iters) {
    const Eigen::MatrixXd gram = a.transpose() * a;
    const Eigen::VectorXd atb = a.transpose() * b;
    const double lip = std::max(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
                                    .eigenvalues()
                                    .maxCoeff(),
                                1e-12);
    const double step = 1.0 / lip;
    auto gradient = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd { return gram * z - atb; };

    LassoSolution sol;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(a.cols());
    Eigen::VectorXd y = z;
    double t = 1.0;
    for (long it = 0; it < max_iters; ++it) {
        const Eigen::VectorXd z_next = soft(y - step * gradient(y), step * lambda);
        // gradient mapping at the current iterate decides termination
        const Eigen::VectorXd gm = lip * (z_next - soft(z_next - step * gradient(z_next), step * lambda));
        sol.iterations = it + 1;
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        // adaptive restart when momentum points uphill
        if ((y - z_next).dot(z_next - z) > 0.0) {
            y = z_next;
            t = 1.0;
        } else {
            y = z_next + ((t - 1.0) / t_next) * (z_next - z);
            t = t_next;
        }
        z = z_next;
        sol.gradient_map_norm = gm.norm();
        if (sol.gradient_map_norm <= tol) break;
    }
    sol.z = z;

    // Exact solve restricted to the support found above.
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < z.size(); ++j)
        if (z[j] != 0.0) support.push_back(j);
    if (!support.empty() && static_cast<Eigen::Index>(support.size()) <= a.rows()) {
        const auto s = static_cast<Eigen::Index>(support.size());
        Eigen::MatrixXd as(a.rows(), s);
        Eigen::VectorXd sign(s);
        for (Eigen::Index j = 0; j < s; ++j) {
            as.col(j) = a.col(support[j]);
            sign[j] = z[support[j]] > 0.0 ? 1.0 : -1.0;
        }
        const Eigen::VectorXd rhs = as.transpose() * b - lambda * sign;
        const Eigen::VectorXd zs = (as.transpose() * as).ldlt().solve(rhs);
        Eigen::VectorXd cand = Eigen::VectorXd::Zero(z.size());
        bool ok = true;
        for (Eigen::Index j = 0; j < s; ++j) {
            if (zs[j] * sign[j] <= 0.0) ok = false;
            cand[support[j]] = zs[j];
        }
        const Eigen::VectorXd g = gradient(cand);
        for (Eigen::Index j = 0; j < z.size() && ok; ++j)
            if (cand[j] == 0.0 && std::abs(g[j]) > lambda) ok = false;
        if (ok) {
            sol.z = cand;
            sol.polished = true;
        }
    }
    return sol;
}

Eigen::VectorXd solve_quadratic_l1(const Eigen::MatrixXd& p, const Eigen::VectorXd& q, double lambda, double tol,
                                   long max_iters) {
    const double lip =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(p, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    const double step = 1.0 / lip;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(q.size());
    for (long it = 0; it < max_iters; ++it) {
        const Eigen::VectorXd next = soft(z - step * (p * z + q), step * lambda);
        const double change = (next - z).norm();
        z = next;
        if (lip * change <= tol) break;
    }
    return z;
}

double signed_sqrt_root(double c) {
    auto f = [c](double z) { return std::copysign(std::sqrt(std::abs(z)), z) + z - c; };
    double lo = std::min(c, 0.0) - 1.0;
    double hi = std::max(c, 0.0) + 1.0;
    for (int it = 0; it < 4000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        (fm < 0.0 ? lo : hi) = mid;
    }
    return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

ComposedL1Solution solve_composed_l1(const Eigen::MatrixXd& k, const Eigen::VectorXd& c, const Eigen::MatrixXd& g,
                                     double lambda) {
    const auto m = g.rows();
    const Eigen::PartialPivLU<Eigen::MatrixXd> klu(k);
    const Eigen::MatrixXd kinv_gt = klu.solve(g.transpose());
    const Eigen::VectorXd kinv_c = klu.solve(c);
    const Eigen::MatrixXd q = g * kinv_gt;
    const Eigen::VectorXd h = g * kinv_c;

    // state[j]: 0 free, 1 at +lambda, 2 at -lambda
    std::vector<int> state(static_cast<std::size_t>(m), 0);
    ComposedL1Solution best;
    best.violation = std::numeric_limits<double>::infinity();
    long total = 1;
    for (Eigen::Index j = 0; j < m; ++j) total *= 3;
    for (long code = 0; code < total; ++code) {
        long rest = code;
        std::vector<Eigen::Index> free_idx;
        Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
        for (Eigen::Index j = 0; j < m; ++j) {
            state[static_cast<std::size_t>(j)] = static_cast<int>(rest % 3);
            rest /= 3;
            if (state[static_cast<std::size_t>(j)] == 0)
                free_idx.push_back(j);
            else
                w[j] = state[static_cast<std::size_t>(j)] == 1 ? lambda : -lambda;
        }
        if (!free_idx.empty()) {
            const auto f = static_cast<Eigen::Index>(free_idx.size());
            Eigen::MatrixXd qff(f, f);
            Eigen::VectorXd rhs(f);
            const Eigen::VectorXd fixed_part = q * w + h;
            for (Eigen::Index a = 0; a < f; ++a) {
                rhs[a] = -fixed_part[free_idx[a]];
                for (Eigen::Index b = 0; b < f; ++b) qff(a, b) = q(free_idx[a], free_idx[b]);
            }
            const Eigen::VectorXd wf = qff.partialPivLu().solve(rhs);
            for (Eigen::Index a = 0; a < f; ++a) w[free_idx[a]] = wf[a];
        }
        // r = G z with z = -K^{-1}(G^T w + c)
        const Eigen::VectorXd r = -(q * w + h);
        double viol = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            switch (state[static_cast<std::size_t>(j)]) {
                case 0:
                    viol = std::max(viol, std::abs(w[j]) - lambda);
                    break;
                case 1:
                    viol = std::max(viol, -r[j]);
                    break;
                default:
                    viol = std::max(viol, r[j]);
                    break;
            }
        }
        if (viol < best.violation) {
            best.violation = viol;
            best.w = w;
            best.z = -(kinv_gt * w + kinv_c);
            if (viol <= 0.0) break;
        }
    }
    return best;
}

}  // namespace psplit::oracle
