#pragma once

#include "sdsa/circuits/boolean_circuit.hpp"
#include "sdsa/oblivious.hpp"

namespace sdsa::oblivious {

inline constexpr size_t kDefaultGateBudget = size_t(1) << 26;

// Builds the Boolean auction circuit for a layout. Generator inputs carry the
// agent's share bits, evaluator inputs the auctioneer's, both in the
// canonical value order, K bits per value LSB first. Output wires follow the
// canonical output word order at the working width.
gc::BooleanCircuit synthesize_circuit(const ObliviousLayout& layout,
                                      size_t max_gates = kDefaultGateBudget);

// K bits per value, LSB first, canonical value order.
std::vector<uint8_t> share_bits(const ObliviousLayout& layout,
                                const std::vector<uint64_t>& values);

// Inverse of the output wire packing: W bits per word, LSB first.
std::vector<uint64_t> words_from_bits(const ObliviousLayout& layout,
                                      const std::vector<uint8_t>& bits);

}  // namespace sdsa::oblivious
