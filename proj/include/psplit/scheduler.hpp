#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "psplit/linalg.hpp"

namespace psplit {

enum class SelectionKind { full, round_robin, seeded_random };
enum class DelayKind { zero, fixed, seeded_random };

/// How blocks are chosen each iteration and how stale their inputs may be.
///
/// Blocks are 0-based here; block n-1 is the operator acting on H_0.
struct SchedulePolicy {
    SelectionKind kind = SelectionKind::full;
    std::size_t block_size = 1;  // round_robin
    double p_select = 0.5;       // seeded_random
    std::uint64_t seed = 0;      // seeded_random selection

    /// M: every block is processed at least once in any M consecutive
    /// iterations. 0 means "use the natural window of `kind`".
    std::size_t coverage_window = 0;
    /// D: bound on k - d(i, k).
    std::size_t max_delay = 0;
    DelayKind delay_kind = DelayKind::zero;
    std::size_t fixed_delay = 0;
    std::uint64_t delay_seed = 0;

    /// M after defaults are applied for an n-block problem.
    std::size_t effective_window(std::size_t n) const;
    void validate(std::size_t n) const;
    friend bool operator==(const SchedulePolicy&, const SchedulePolicy&) = default;
};

/// Deterministic replay of a block-iterative, delayed schedule.
///
/// Any block left out for M-1 consecutive iterations is forced into the
/// next selection, so the coverage window holds whatever the policy draws.
class Scheduler {
public:
    Scheduler(SchedulePolicy policy, std::size_t num_blocks);

    /// I_k, sorted ascending. Must be called with k = 1, 2, 3, ...
    std::vector<std::size_t> select_blocks(long k);

    /// d(i, k) in [max(1, k - D), k].
    long delayed_index(std::size_t block, long k);

    const SchedulePolicy& policy() const { return policy_; }
    std::size_t window() const { return window_; }

private:
    SchedulePolicy policy_;
    std::size_t n_;
    std::size_t window_;
    long last_k_ = 0;
    std::vector<long> last_selected_;
    std::mt19937_64 select_rng_;
    std::mt19937_64 delay_rng_;
};

/// The last D+1 iterates, addressable by iteration number.
class HistoryBuffer {
public:
    explicit HistoryBuffer(std::size_t max_delay);

    /// Stores p as iterate k. Iterations must be recorded consecutively.
    void record(long k, PrimalDualPoint p);

    /// Iterate j; ContractError unless latest - D <= j <= latest.
    const PrimalDualPoint& read(long j) const;

    long latest() const { return latest_; }
    std::size_t max_delay() const { return max_delay_; }

private:
    std::size_t max_delay_;
    long latest_ = 0;
    std::deque<PrimalDualPoint> ring_;
};

}  // namespace psplit
