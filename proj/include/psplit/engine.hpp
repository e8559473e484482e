#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psplit/linalg.hpp"
#include "psplit/operators.hpp"
#include "psplit/problem.hpp"
#include "psplit/scheduler.hpp"

namespace psplit {

struct EngineConfig {
    double gamma = 1.0;
    double beta = 1.0;
    double beta_lo = 0.01;
    double beta_hi = 1.99;
    double nu = 0.5;
    double delta = 1.0;
    int max_backtracks = 200;
    /// Initial trial stepsize per block; empty means 1.0 everywhere, a single
    /// entry is broadcast.
    std::vector<double> rho;
    double rho_lo = 1e-6;
    double rho_hi = 1e6;
    double tol_primal = 1e-6;
    double tol_dual = 1e-6;
    long max_iters = 10000;
    double quickstop_eps = 1e-14;
    double pi_zero_eps = 1e-24;
    /// Evaluate the selected blocks of an iteration concurrently.
    bool parallel_blocks = true;
    /// Test hook: multiplies every projection step. Values other than 1 break
    /// the relaxation bounds on purpose and are only meant for mutation tests.
    double alpha_scale = 1.0;

    double rho_for(std::size_t block) const;
    friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
    /// Throws ConfigError naming the violated bound.
    void validate(std::size_t num_blocks) const;
};

struct BacktrackParams {
    double nu = 0.5;
    double delta = 1.0;
    int max_backtracks = 200;
    double quickstop_eps = 1e-14;
};

/// (x_i, y_i) of one block together with its bookkeeping.
struct BlockState {
    Vec x;
    Vec y;
    double rho_accepted = 0.0;
    long last_update_iter = 0;  // s(i, k)
    long source_iter = 0;       // l(i, k)

    friend bool operator==(const BlockState&, const BlockState&) = default;
};

struct BackwardResult {
    ProxResult prox;
    Vec error;
    Vec input;  // a = G z + rho w + e
    int halvings = 0;
};

struct ForwardResult {
    Vec x;
    Vec y;
    Vec zeta;  // T(G z)
    double rho_hat = 0.0;
    int backtracks = 0;
    bool quick_stop = false;
};

/// Resolvent step on the (possibly delayed) inputs gz = G z, w.
/// `errors` may be null for exact evaluation.
BackwardResult backward_update(const MonotoneOperator& t, const Vec& gz, const Vec& w, double rho,
                               ErrorInjector* errors);

/// Two-forward-step update with backtracking on the trial stepsize.
/// Throws AssumptionViolation if more than max_backtracks trials are needed.
ForwardResult forward_update_with_backtrack(const MonotoneOperator& t, const Vec& gz, const Vec& w,
                                            double rho_init, const BacktrackParams& params);

/// The separating affine function of one iteration, evaluated at p.
struct SeparatorEval {
    std::vector<Vec> u;  // x_i - G_i x_n, i < n
    Vec v;               // sum G_i^* y_i + y_n
    double pi = 0.0;
    double phi_at_p = 0.0;
    double alpha = 0.0;
};

SeparatorEval evaluate_separator(const ProblemSpec& problem, std::span<const BlockState> blocks,
                                 const PrimalDualPoint& p, double gamma, double beta);

/// phi(q) = sum_{i<n} <G_i z - x_i, y_i - w_i> + <z - x_n, y_n - w_n>, w_n = -sum G_i^* w_i.
double affine_value(const ProblemSpec& problem, std::span<const BlockState> blocks, const PrimalDualPoint& q);

/// Gradient of phi in the gamma-weighted geometry, assembled block by block.
PrimalDualPoint separator_gradient(const ProblemSpec& problem, std::span<const BlockState> blocks,
                                   double gamma);

/// z - alpha v / gamma, w_i - alpha u_i.
PrimalDualPoint project(const PrimalDualPoint& p, const SeparatorEval& sep, double gamma);

/// What happened to one block during one iteration.
struct BlockUpdate {
    std::size_t block = 0;
    BlockKind kind = BlockKind::backward;
    long delayed_iter = 0;
    Vec gz{0.0};
    Vec w{0.0};
    double rho = 0.0;
    // backward
    Vec error{0.0};
    Vec input{0.0};
    int halvings = 0;
    // forward
    Vec zeta{0.0};
    double rho_hat = 0.0;
    int backtracks = 0;
    bool quick_stop = false;
};

struct IterationRecord {
    long iter = 0;
    double phi = 0.0;
    double pi = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> primal_residual;  // ||G_i z^k - x_i^k||
    std::vector<double> dual_residual;    // ||y_i^k - w_i^k||
    std::vector<int> backtracks;          // 0 unless the block ran a linesearch
    std::vector<double> stepsizes;        // accepted (forward) or used (backward) rho
    std::vector<std::size_t> selected;
    std::vector<long> delays;  // d(i, k), or -1 when i is not in I_k

    double max_primal_residual() const;
    double max_dual_residual() const;
};

enum class RunStatus { running, converged, exact_termination, budget, assumption_violation };

const char* to_string(RunStatus status);

struct StepOutcome {
    RunStatus status = RunStatus::running;
    std::optional<PrimalDualPoint> solution;
};

struct RunTrace {
    std::vector<IterationRecord> records;
    RunStatus status = RunStatus::running;
    PrimalDualPoint solution{Vec{0.0}, {}};
    long iterations = 0;
    std::string message;
    double wall_time_seconds = 0.0;
};

/// Everything an observer may inspect about iteration k, before p moves on.
struct IterationView {
    long k = 0;
    const PrimalDualPoint& p;
    const PrimalDualPoint& p_next;
    std::span<const BlockState> blocks;
    std::span<const BlockState> previous_blocks;
    const SeparatorEval& separator;
    std::span<const BlockUpdate> updates;
    const IterationRecord& record;
    bool exact_termination = false;
};

using IterationObserver = std::function<void(const IterationView&)>;

/// Block-iterative projective splitting with delayed reads, backtracking
/// forward steps and inexact resolvents.
class Engine {
public:
    /// Initial blocks default to x_i = G_i z^1, y_i = 0.
    Engine(ProblemSpec problem, EngineConfig config, SchedulePolicy schedule, ErrorPolicy errors = {},
           std::optional<std::vector<BlockState>> initial_blocks = std::nullopt);

    StepOutcome step();
    RunTrace run();

    void set_observer(IterationObserver observer) { observer_ = std::move(observer); }

    const ProblemSpec& problem() const { return problem_; }
    const EngineConfig& config() const { return config_; }
    const PrimalDualPoint& point() const { return p_; }
    std::span<const BlockState> blocks() const { return blocks_; }
    long iteration() const { return k_; }
    const std::vector<IterationRecord>& records() const { return records_; }

private:
    BlockUpdate update_block(std::size_t i, long d, BlockState& out);

    ProblemSpec problem_;
    EngineConfig config_;
    Scheduler scheduler_;
    HistoryBuffer history_;
    std::vector<ErrorInjector> injectors_;
    PrimalDualPoint p_;
    std::vector<BlockState> blocks_;
    std::vector<char> covered_;
    long k_ = 0;
    std::vector<IterationRecord> records_;
    IterationObserver observer_;
};

}  // namespace psplit
