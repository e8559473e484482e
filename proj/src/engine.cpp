#include "psplit/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>

namespace psplit {

double EngineConfig::rho_for(std::size_t block) const {
    if (rho.empty()) return 1.0;
    if (rho.size() == 1) return rho.front();
    return rho.at(block);
}

void EngineConfig::validate(std::size_t num_blocks) const {
    auto bad = [](const std::string& msg) { throw ConfigError(msg); };
    if (!(gamma > 0.0) || !std::isfinite(gamma)) bad("engine.gamma must be > 0");
    if (!(beta_lo > 0.0)) bad("engine.beta_lo must satisfy 0 < beta_lo");
    if (!(beta_hi < 2.0)) bad("engine.beta_hi must satisfy beta_hi < 2 (\u03B2\u0305 < 2)");
    if (!(beta_lo <= beta_hi)) bad("engine.beta_lo must satisfy beta_lo <= beta_hi");
    if (!(beta >= beta_lo && beta <= beta_hi)) bad("engine.beta must lie in [beta_lo, beta_hi]");
    if (!(nu > 0.0 && nu < 1.0)) bad("engine.nu must satisfy nu in (0, 1) (\u03BD \u2208 (0,1))");
    if (!(delta > 0.0) || !std::isfinite(delta)) bad("engine.delta must be > 0");
    if (max_backtracks < 1) bad("engine.max_backtracks must be >= 1");
    if (!(rho_lo > 0.0)) bad("engine.rho_lo must be > 0");
    if (!(rho_hi < HUGE_VAL) || !(rho_lo <= rho_hi)) bad("engine.rho_hi must be finite and >= rho_lo");
    if (rho.size() > 1 && rho.size() != num_blocks)
        bad("engine.rho must have one entry per block (" + std::to_string(num_blocks) + ")");
    for (std::size_t i = 0; i < num_blocks; ++i) {
        const double r = rho_for(i);
        if (!(r >= rho_lo && r <= rho_hi)) bad("engine.rho must lie in [rho_lo, rho_hi]");
    }
    if (!(tol_primal > 0.0)) bad("engine.tol_primal must be > 0");
    if (!(tol_dual > 0.0)) bad("engine.tol_dual must be > 0");
    if (max_iters < 0) bad("engine.max_iters must be >= 0");
    if (!(quickstop_eps >= 0.0)) bad("engine.quickstop_eps must be >= 0");
    if (!(pi_zero_eps >= 0.0)) bad("engine.pi_zero_eps must be >= 0");
    if (!(alpha_scale > 0.0) || !std::isfinite(alpha_scale)) bad("engine.alpha_scale must be > 0");
}

BackwardResult backward_update(const MonotoneOperator& t, const Vec& gz, const Vec& w, double rho,
                               ErrorInjector* errors) {
    if (!(rho > 0.0)) throw ConfigError("backward_update: rho must be positive");
    Vec base = axpy(gz, rho, w);
    if (errors == nullptr) {
        ProxResult r = t.prox(rho, base);
        Vec zero = Vec::zeros(base.size());
        return {std::move(r), std::move(zero), std::move(base), 0};
    }
    InjectedProx inj = errors->inject(base, t, rho, gz, w);
    Vec a = base + inj.error;
    return {std::move(inj.result), std::move(inj.error), std::move(a), inj.halvings};
}

ForwardResult forward_update_with_backtrack(const MonotoneOperator& t, const Vec& gz, const Vec& w,
                                            double rho_init, const BacktrackParams& params) {
    if (!(rho_init > 0.0)) throw ConfigError("forward update: rho_init must be positive");
    Vec zeta = t.forward(gz);
    const Vec residual = zeta - w;
    if (norm(residual) <= params.quickstop_eps * (1.0 + norm(w)))
        return {gz, zeta, zeta, rho_init, 0, true};

    double rho = rho_init;
    for (int j = 1; j <= params.max_backtracks; ++j) {
        Vec x = axpy(gz, -rho, residual);
        try {
            Vec y = t.forward(x);
            const Vec step = gz - x;
            const double lhs = params.delta * squared_norm(step) - dot(step, y - w);
            if (lhs <= 0.0) return {std::move(x), std::move(y), std::move(zeta), rho, j, false};
        } catch (const NonFiniteValue&) {
            // overflow in T at this trial point counts as a rejected trial
        }
        rho *= params.nu;
    }
    throw AssumptionViolation(t.name() + ": backtracking linesearch exceeded " +
                              std::to_string(params.max_backtracks) +
                              " trials without meeting the acceptance test");
}

SeparatorEval evaluate_separator(const ProblemSpec& problem, std::span<const BlockState> blocks,
                                 const PrimalDualPoint& p, double gamma, double beta) {
    const std::size_t n = problem.num_blocks();
    if (blocks.size() != n) throw StructuralError("evaluate_separator: need one state per block");
    const BlockState& last = blocks[n - 1];

    SeparatorEval sep{{}, Vec::zeros(problem.primal.dim), 0.0, 0.0, 0.0};
    std::vector<double> v(problem.primal.dim, 0.0);
    sep.u.reserve(n - 1);
    double u_sq = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        sep.u.push_back(blocks[i].x - problem.maps[i].apply(last.x));
        u_sq += squared_norm(sep.u.back());
        const Vec g = problem.maps[i].apply_adjoint(blocks[i].y);
        for (std::size_t j = 0; j < v.size(); ++j) v[j] += g[j];
    }
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += last.y[j];
    sep.v = Vec(std::move(v));
    sep.pi = u_sq + squared_norm(sep.v) / gamma;

    double phi = dot(p.z, sep.v);
    for (std::size_t i = 0; i + 1 < n; ++i) phi += dot(p.w[i], sep.u[i]);
    for (std::size_t i = 0; i < n; ++i) phi -= dot(blocks[i].x, blocks[i].y);
    sep.phi_at_p = phi;
    sep.alpha = sep.pi > 0.0 ? beta * std::max(0.0, phi) / sep.pi : 0.0;
    return sep;
}

double affine_value(const ProblemSpec& problem, std::span<const BlockState> blocks, const PrimalDualPoint& q) {
    const std::size_t n = problem.num_blocks();
    if (blocks.size() != n) throw StructuralError("affine_value: need one state per block");
    require_shape(q, problem.dual_spaces(), problem.primal);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec gz = problem.apply_map(i, q.z);
        const Vec wi = problem.dual_block(i, q);
        value += dot(gz - blocks[i].x, blocks[i].y - wi);
    }
    return value;
}

PrimalDualPoint separator_gradient(const ProblemSpec& problem, std::span<const BlockState> blocks, double gamma) {
    const std::size_t n = problem.num_blocks();
    if (blocks.size() != n) throw StructuralError("separator_gradient: need one state per block");
    Vec zpart = blocks[n - 1].y;
    PrimalDualPoint grad{Vec::zeros(problem.primal.dim), {}};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        zpart = zpart + problem.maps[i].apply_adjoint(blocks[i].y);
        grad.w.push_back(blocks[i].x - problem.maps[i].apply(blocks[n - 1].x));
    }
    grad.z = (1.0 / gamma) * zpart;
    return grad;
}

PrimalDualPoint project(const PrimalDualPoint& p, const SeparatorEval& sep, double gamma) {
    if (sep.u.size() != p.w.size()) throw StructuralError("project: separator does not match the point");
    if (sep.alpha == 0.0) return p;
    PrimalDualPoint out{axpy(p.z, -sep.alpha / gamma, sep.v), {}};
    out.w.reserve(p.w.size());
    for (std::size_t i = 0; i < p.w.size(); ++i) out.w.push_back(axpy(p.w[i], -sep.alpha, sep.u[i]));
    return out;
}

double IterationRecord::max_primal_residual() const {
    return primal_residual.empty() ? 0.0 : *std::max_element(primal_residual.begin(), primal_residual.end());
}

double IterationRecord::max_dual_residual() const {
    return dual_residual.empty() ? 0.0 : *std::max_element(dual_residual.begin(), dual_residual.end());
}

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::running:
            return "running";
        case RunStatus::converged:
            return "converged";
        case RunStatus::exact_termination:
            return "exact-termination";
        case RunStatus::budget:
            return "budget";
        case RunStatus::assumption_violation:
            return "assumption-violation";
    }
    return "unknown";
}

namespace {

std::uint64_t block_seed(std::uint64_t seed, std::size_t block) {
    // splitmix64 finalizer, so neighbouring blocks get unrelated streams
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (block + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

Engine::Engine(ProblemSpec problem, EngineConfig config, SchedulePolicy schedule, ErrorPolicy errors,
               std::optional<std::vector<BlockState>> initial_blocks)
    : problem_(std::move(problem)),
      config_(std::move(config)),
      scheduler_((problem_.validate(), schedule), problem_.num_blocks()),
      history_(schedule.max_delay),
      p_(problem_.initial) {
    config_.validate(problem_.num_blocks());
    errors.validate();
    const std::size_t n = problem_.num_blocks();
    for (std::size_t i = 0; i < n; ++i) {
        ErrorPolicy per_block = errors;
        per_block.seed = block_seed(errors.seed, i);
        injectors_.emplace_back(per_block);
    }
    if (initial_blocks) {
        if (initial_blocks->size() != n) throw StructuralError("initial block states: need one per block");
        for (std::size_t i = 0; i < n; ++i) {
            const auto& b = (*initial_blocks)[i];
            if (b.x.space() != problem_.block_space(i) || b.y.space() != problem_.block_space(i))
                throw StructuralError("initial block state " + std::to_string(i + 1) + " has wrong dimension");
        }
        blocks_ = std::move(*initial_blocks);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            Vec x = problem_.apply_map(i, p_.z);
            Vec y = Vec::zeros(x.size());
            blocks_.push_back({std::move(x), std::move(y), config_.rho_for(i), 0, 0});
        }
    }
    covered_.assign(n, 0);
    history_.record(1, p_);
}

BlockUpdate Engine::update_block(std::size_t i, long d, BlockState& out) {
    const PrimalDualPoint& pd = history_.read(d);
    BlockUpdate up;
    up.block = i;
    up.kind = problem_.partition[i];
    up.delayed_iter = d;
    up.gz = problem_.apply_map(i, pd.z);
    up.w = problem_.dual_block(i, pd);
    up.rho = config_.rho_for(i);
    const MonotoneOperator& t = problem_.operators[i];
    if (up.kind == BlockKind::backward) {
        BackwardResult r = backward_update(t, up.gz, up.w, up.rho, &injectors_[i]);
        out.x = std::move(r.prox.x);
        out.y = std::move(r.prox.y);
        out.rho_accepted = up.rho;
        up.error = std::move(r.error);
        up.input = std::move(r.input);
        up.halvings = r.halvings;
    } else {
        const BacktrackParams bp{config_.nu, config_.delta, config_.max_backtracks, config_.quickstop_eps};
        ForwardResult r = forward_update_with_backtrack(t, up.gz, up.w, up.rho, bp);
        out.x = std::move(r.x);
        out.y = std::move(r.y);
        out.rho_accepted = r.rho_hat;
        up.zeta = std::move(r.zeta);
        up.rho_hat = r.rho_hat;
        up.backtracks = r.backtracks;
        up.quick_stop = r.quick_stop;
    }
    out.last_update_iter = k_;
    out.source_iter = d;
    return up;
}

StepOutcome Engine::step() {
    if (k_ >= config_.max_iters) return {RunStatus::budget, p_};
    ++k_;
    const std::size_t n = problem_.num_blocks();

    const std::vector<std::size_t> selected = scheduler_.select_blocks(k_);
    std::vector<long> delays(n, -1);
    for (std::size_t i : selected) delays[i] = scheduler_.delayed_index(i, k_);

    const std::vector<BlockState> previous = blocks_;
    std::vector<BlockState> fresh(selected.size(), blocks_.front());
    std::vector<BlockUpdate> updates(selected.size());
    std::vector<std::exception_ptr> failures(selected.size());
    const auto count = static_cast<long>(selected.size());
#pragma omp parallel for schedule(dynamic) if (config_.parallel_blocks && count > 1)
    for (long s = 0; s < count; ++s) {
        const auto slot = static_cast<std::size_t>(s);
        try {
            const std::size_t i = selected[slot];
            updates[slot] = update_block(i, delays[i], fresh[slot]);
        } catch (...) {
            failures[slot] = std::current_exception();
        }
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    for (std::size_t s = 0; s < selected.size(); ++s) {
        blocks_[selected[s]] = std::move(fresh[s]);
        covered_[selected[s]] = 1;
    }
    const bool all_covered = std::all_of(covered_.begin(), covered_.end(), [](char c) { return c != 0; });

    IterationRecord rec;
    rec.iter = k_;
    rec.beta = config_.beta;
    rec.selected = selected;
    rec.delays = delays;
    rec.backtracks.assign(n, 0);
    for (const auto& up : updates) rec.backtracks[up.block] = up.backtracks;
    for (std::size_t i = 0; i < n; ++i) {
        rec.primal_residual.push_back(norm(problem_.apply_map(i, p_.z) - blocks_[i].x));
        rec.dual_residual.push_back(norm(blocks_[i].y - problem_.dual_block(i, p_)));
        rec.stepsizes.push_back(blocks_[i].rho_accepted);
    }

    SeparatorEval sep = evaluate_separator(problem_, blocks_, p_, config_.gamma, config_.beta);
    rec.phi = sep.phi_at_p;
    rec.pi = sep.pi;

    bool exact = false;
    if (sep.pi <= config_.pi_zero_eps) {
        sep.alpha = 0.0;
        exact = all_covered;
    } else {
        sep.alpha *= config_.alpha_scale;
    }
    rec.alpha = sep.alpha;

    PrimalDualPoint next = p_;
    if (exact) {
        next.z = blocks_[n - 1].x;
        for (std::size_t i = 0; i + 1 < n; ++i) next.w[i] = blocks_[i].y;
    } else {
        next = project(p_, sep, config_.gamma);
    }

    records_.push_back(rec);
    if (observer_)
        observer_(IterationView{k_, p_, next, blocks_, previous, sep, updates, records_.back(), exact});

    p_ = std::move(next);
    history_.record(k_ + 1, p_);

    if (exact) return {RunStatus::exact_termination, p_};
    if (all_covered && rec.max_primal_residual() <= config_.tol_primal &&
        rec.max_dual_residual() <= config_.tol_dual)
        return {RunStatus::converged, p_};
    return {RunStatus::running, std::nullopt};
}

RunTrace Engine::run() {
    const auto t0 = std::chrono::steady_clock::now();
    RunTrace trace;
    try {
        for (;;) {
            StepOutcome out = step();
            if (out.status != RunStatus::running) {
                trace.status = out.status;
                trace.solution = std::move(*out.solution);
                break;
            }
        }
    } catch (const AssumptionViolation& e) {
        trace.status = RunStatus::assumption_violation;
        trace.message = e.what();
        trace.solution = p_;
    } catch (const NonFiniteValue& e) {
        trace.status = RunStatus::assumption_violation;
        trace.message = std::string("iterates left the finite range: ") + e.what();
        trace.solution = p_;
    }
    trace.records = records_;
    trace.iterations = k_;
    trace.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return trace;
}

}  // namespace psplit
