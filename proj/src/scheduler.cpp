#include "psplit/scheduler.hpp"

#include <algorithm>
#include <string>

namespace psplit {

std::size_t SchedulePolicy::effective_window(std::size_t n) const {
    if (coverage_window != 0) return coverage_window;
    switch (kind) {
        case SelectionKind::full:
            return n;
        case SelectionKind::round_robin:
            return (n + block_size - 1) / std::max<std::size_t>(block_size, 1);
        case SelectionKind::seeded_random:
            return n;
    }
    return n;
}

void SchedulePolicy::validate(std::size_t n) const {
    if (n == 0) throw ConfigError("schedule: problem has no blocks");
    if (kind == SelectionKind::round_robin && (block_size == 0 || block_size > n))
        throw ConfigError("schedule.block_size must lie in [1, n]");
    if (kind == SelectionKind::seeded_random && !(p_select > 0.0 && p_select <= 1.0))
        throw ConfigError("schedule.p_select must lie in (0, 1]");
    if (effective_window(n) == 0) throw ConfigError("schedule.M must be >= 1");
    if (delay_kind == DelayKind::fixed && fixed_delay > max_delay)
        throw ConfigError("schedule.delay.d must satisfy d <= D");
}

Scheduler::Scheduler(SchedulePolicy policy, std::size_t num_blocks)
    : policy_(policy),
      n_(num_blocks),
      window_(policy.effective_window(num_blocks)),
      last_selected_(num_blocks, 0),
      select_rng_(policy.seed),
      delay_rng_(policy.delay_seed) {
    policy_.validate(num_blocks);
}

std::vector<std::size_t> Scheduler::select_blocks(long k) {
    if (k != last_k_ + 1)
        throw ContractError("select_blocks called out of order: expected k=" + std::to_string(last_k_ + 1));
    last_k_ = k;

    std::vector<char> chosen(n_, 0);
    switch (policy_.kind) {
        case SelectionKind::full:
            std::fill(chosen.begin(), chosen.end(), 1);
            break;
        case SelectionKind::round_robin: {
            const auto start = static_cast<std::size_t>(k - 1) * policy_.block_size;
            for (std::size_t j = 0; j < policy_.block_size; ++j) chosen[(start + j) % n_] = 1;
            break;
        }
        case SelectionKind::seeded_random: {
            std::bernoulli_distribution coin(policy_.p_select);
            for (std::size_t i = 0; i < n_; ++i) chosen[i] = coin(select_rng_) ? 1 : 0;
            break;
        }
    }
    for (std::size_t i = 0; i < n_; ++i)
        if (k - last_selected_[i] >= static_cast<long>(window_)) chosen[i] = 1;
    if (std::none_of(chosen.begin(), chosen.end(), [](char c) { return c != 0; })) {
        std::uniform_int_distribution<std::size_t> pick(0, n_ - 1);
        chosen[pick(select_rng_)] = 1;
    }

    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n_; ++i) {
        if (chosen[i]) {
            out.push_back(i);
            last_selected_[i] = k;
        }
    }
    return out;
}

long Scheduler::delayed_index(std::size_t, long k) {
    const long lo = std::max(1L, k - static_cast<long>(policy_.max_delay));
    switch (policy_.delay_kind) {
        case DelayKind::zero:
            return k;
        case DelayKind::fixed:
            return std::max(1L, k - static_cast<long>(policy_.fixed_delay));
        case DelayKind::seeded_random: {
            std::uniform_int_distribution<long> pick(lo, k);
            return pick(delay_rng_);
        }
    }
    return k;
}

HistoryBuffer::HistoryBuffer(std::size_t max_delay) : max_delay_(max_delay) {}

void HistoryBuffer::record(long k, PrimalDualPoint p) {
    if (!ring_.empty() && k != latest_ + 1)
        throw ContractError("history must be recorded consecutively: expected " + std::to_string(latest_ + 1));
    ring_.push_back(std::move(p));
    latest_ = k;
    while (ring_.size() > max_delay_ + 1) ring_.pop_front();
}

const PrimalDualPoint& HistoryBuffer::read(long j) const {
    const long oldest = latest_ - static_cast<long>(ring_.size()) + 1;
    if (ring_.empty() || j < oldest || j > latest_)
        throw ContractError("history read of iteration " + std::to_string(j) + " outside window [" +
                            std::to_string(oldest) + ", " + std::to_string(latest_) + "]");
    return ring_[static_cast<std::size_t>(j - oldest)];
}

}  // namespace psplit
