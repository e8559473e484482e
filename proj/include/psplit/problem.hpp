#pragma once

#include <string>
#include <vector>

#include "psplit/linalg.hpp"
#include "psplit/operators.hpp"

namespace psplit {

enum class BlockKind { forward, backward };

const char* to_string(BlockKind kind);

/// 0 in sum_{i<n} G_i^* T_i(G_i z) + T_n(z), with G_n = I.
///
/// operators[i] acts on the codomain of maps[i] for i < n-1; the last
/// operator acts on H_0. partition[i] says whether block i is processed
/// with forward steps or with its resolvent.
struct ProblemSpec {
    std::string name;
    Space primal{1};
    std::vector<LinearMap> maps;
    std::vector<MonotoneOperator> operators;
    std::vector<BlockKind> partition;
    PrimalDualPoint initial{Vec{0.0}, {}};

    std::size_t num_blocks() const { return operators.size(); }
    Space block_space(std::size_t i) const;
    std::vector<Space> dual_spaces() const;

    /// G_i z, with G_{n-1} = I.
    Vec apply_map(std::size_t i, const Vec& z) const;
    /// Dual block i of p, with the last one derived.
    Vec dual_block(std::size_t i, const PrimalDualPoint& p) const;

    /// Throws StructuralError on shape problems and ConfigError when the
    /// partition asks for an evaluation an operator does not support.
    void validate() const;
};

}  // namespace psplit
