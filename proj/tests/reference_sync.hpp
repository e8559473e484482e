#pragma once

// A plain synchronous implementation of the splitting iteration, written
// against raw arrays. It only borrows operator evaluations and the linear
// maps from the library, so the engine's bookkeeping (scheduler, history,
// records, parallel block loop) can be compared against it exactly.

#include <algorithm>
#include <cmath>
#include <vector>

#include "psplit/engine.hpp"

namespace psplit::testing {

using Arr = std::vector<double>;

struct SyncIterate {
    double phi = 0.0;
    double pi = 0.0;
    double alpha = 0.0;
    Arr z;
    std::vector<Arr> w;
    std::vector<Arr> x;
    std::vector<Arr> y;
    std::vector<int> backtracks;
};

inline Arr to_arr(const Vec& v) { return Arr(v.entries().begin(), v.entries().end()); }

inline double arr_dot(const Arr& a, const Arr& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::vector<SyncIterate> run_reference_sync(const ProblemSpec& pb, const EngineConfig& cfg, int iters) {
    const std::size_t n = pb.num_blocks();
    const std::size_t d0 = pb.primal.dim;
    Arr z = to_arr(pb.initial.z);
    std::vector<Arr> w;
    for (const auto& wi : pb.initial.w) w.push_back(to_arr(wi));

    auto gmap = [&](std::size_t i, const Arr& v) -> Arr {
        return i + 1 < n ? to_arr(pb.maps[i].apply(Vec(v))) : v;
    };
    auto gadj = [&](std::size_t i, const Arr& v) -> Arr {
        return i + 1 < n ? to_arr(pb.maps[i].apply_adjoint(Vec(v))) : v;
    };
    auto wn = [&](const std::vector<Arr>& ws) {
        Arr acc(d0, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const Arr g = gadj(i, ws[i]);
            for (std::size_t j = 0; j < d0; ++j) acc[j] += -1.0 * g[j];
        }
        return acc;
    };

    std::vector<Arr> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = gmap(i, z);
        y[i] = Arr(x[i].size(), 0.0);
    }

    std::vector<SyncIterate> out;
    for (int k = 1; k <= iters; ++k) {
        SyncIterate it;
        it.backtracks.assign(n, 0);
        const Arr w_last = wn(w);
        for (std::size_t i = 0; i < n; ++i) {
            const Arr gz = gmap(i, z);
            const Arr& wi = i + 1 < n ? w[i] : w_last;
            const double rho = cfg.rho_for(i);
            const auto& t = pb.operators[i];
            if (pb.partition[i] == BlockKind::backward) {
                Arr a(gz);
                for (std::size_t j = 0; j < a.size(); ++j) a[j] += rho * wi[j];
                const ProxResult r = t.prox(rho, Vec(a));
                x[i] = to_arr(r.x);
                y[i] = to_arr(r.y);
                continue;
            }
            const Arr zeta = to_arr(t.forward(Vec(gz)));
            Arr res(gz.size());
            for (std::size_t j = 0; j < res.size(); ++j) res[j] = zeta[j] - wi[j];
            if (std::sqrt(arr_dot(res, res)) <= cfg.quickstop_eps * (1.0 + std::sqrt(arr_dot(wi, wi)))) {
                x[i] = gz;
                y[i] = zeta;
                continue;
            }
            double r = rho;
            for (int j = 1;; ++j) {
                REQUIRE(j <= cfg.max_backtracks);
                Arr xt(gz);
                for (std::size_t q = 0; q < xt.size(); ++q) xt[q] += -r * res[q];
                const Arr yt = to_arr(t.forward(Vec(xt)));
                Arr step(gz.size()), dy(gz.size());
                for (std::size_t q = 0; q < step.size(); ++q) {
                    step[q] = gz[q] - xt[q];
                    dy[q] = yt[q] - wi[q];
                }
                if (cfg.delta * arr_dot(step, step) - arr_dot(step, dy) <= 0.0) {
                    x[i] = xt;
                    y[i] = yt;
                    it.backtracks[i] = j;
                    break;
                }
                r *= cfg.nu;
            }
        }

        std::vector<Arr> u;
        Arr v(d0, 0.0);
        double usq = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const Arr gx = gmap(i, x[n - 1]);
            Arr ui(x[i].size());
            for (std::size_t j = 0; j < ui.size(); ++j) ui[j] = x[i][j] - gx[j];
            usq += arr_dot(ui, ui);
            u.push_back(ui);
            const Arr g = gadj(i, y[i]);
            for (std::size_t j = 0; j < d0; ++j) v[j] += g[j];
        }
        for (std::size_t j = 0; j < d0; ++j) v[j] += y[n - 1][j];
        it.pi = usq + arr_dot(v, v) / cfg.gamma;
        double phi = arr_dot(z, v);
        for (std::size_t i = 0; i + 1 < n; ++i) phi += arr_dot(w[i], u[i]);
        for (std::size_t i = 0; i < n; ++i) phi -= arr_dot(x[i], y[i]);
        it.phi = phi;
        it.alpha = it.pi > cfg.pi_zero_eps ? cfg.beta * std::max(0.0, phi) / it.pi : 0.0;

        if (it.alpha != 0.0) {
            for (std::size_t j = 0; j < d0; ++j) z[j] += -it.alpha / cfg.gamma * v[j];
            for (std::size_t i = 0; i + 1 < n; ++i)
                for (std::size_t j = 0; j < w[i].size(); ++j) w[i][j] += -it.alpha * u[i][j];
        }
        it.z = z;
        it.w = w;
        it.x = x;
        it.y = y;
        const bool stop = !(it.pi > cfg.pi_zero_eps);
        out.push_back(std::move(it));
        if (stop) break;
    }
    return out;
}

}  // namespace psplit::testing
