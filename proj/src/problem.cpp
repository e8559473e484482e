#include "psplit/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace psplit {

const char* to_string(BlockKind kind) { return kind == BlockKind::forward ? "forward" : "backward"; }

Space ProblemSpec::block_space(std::size_t i) const {
    return i + 1 < num_blocks() ? maps[i].codomain() : primal;
}

std::vector<Space> ProblemSpec::dual_spaces() const {
    std::vector<Space> out;
    for (const auto& g : maps) out.push_back(g.codomain());
    return out;
}

Vec ProblemSpec::apply_map(std::size_t i, const Vec& z) const {
    return i + 1 < num_blocks() ? maps[i].apply(z) : z;
}

Vec ProblemSpec::dual_block(std::size_t i, const PrimalDualPoint& p) const {
    return i + 1 < num_blocks() ? p.w[i] : derived_wn(p, maps);
}

void ProblemSpec::validate() const {
    const std::size_t n = num_blocks();
    if (n == 0) throw StructuralError(name + ": problem needs at least one operator");
    if (maps.size() + 1 != n) throw StructuralError(name + ": need exactly n-1 linear maps");
    if (partition.size() != n) throw StructuralError(name + ": partition must list every block");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (maps[i].domain() != primal)
            throw StructuralError(name + ": map " + std::to_string(i + 1) + " does not start at H_0");
    for (std::size_t i = 0; i < n; ++i) {
        if (operators[i].space() != block_space(i))
            throw StructuralError(name + ": operator " + std::to_string(i + 1) + " acts on the wrong space");
        if (partition[i] == BlockKind::forward && !operators[i].can_forward())
            throw ConfigError(name + ": block " + std::to_string(i + 1) + " (" + operators[i].name() +
                              ") is in I_F but is not forward-evaluable");
        if (partition[i] == BlockKind::backward && !operators[i].can_prox())
            throw ConfigError(name + ": block " + std::to_string(i + 1) + " (" + operators[i].name() +
                              ") is in I_B but is not prox-evaluable");
    }
    const auto duals = dual_spaces();
    require_shape(initial, duals, primal);
}

}  // namespace psplit
