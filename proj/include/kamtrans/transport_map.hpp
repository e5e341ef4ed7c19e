#pragma once

#include <vector>

#include "kamtrans/grid.hpp"

namespace kamtrans {

/// Transport map represented as an ordered stack of near-identity
/// perturbations v_k: the map is (Id + v_last) ∘ ... ∘ (Id + v_0).
/// Each factor and the flattened composite must be strictly increasing
/// at nodes.
struct TransportMap {
    Grid grid;
    std::vector<GridFunction> stack;  // perturbations v_k, oldest first

    explicit TransportMap(const Grid& g) : grid(g) {}

    bool empty() const { return stack.empty(); }
};

/// Left-to-right node-wise composition of the stack; Id for an empty stack.
/// Throws FlattenError if the composite is not strictly increasing.
GridFunction flatten(const TransportMap& T);

}  // namespace kamtrans
