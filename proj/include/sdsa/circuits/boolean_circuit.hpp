#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sdsa::gc {

struct circuit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GateKind : uint8_t { And, Xor, Or, Not, Const };

struct Gate {
    GateKind kind;
    uint32_t in0;  // for Const gates this is the constant bit
    uint32_t in1;  // ignored by Not/Const
    uint32_t out;
};

// Gate-level function of two parties. Wires [0, generator_inputs) carry the
// generator's input bits, the next evaluator_inputs wires the evaluator's;
// every gate writes one fresh wire, so gates are topological by construction.
struct BooleanCircuit {
    uint32_t generator_inputs = 0;
    uint32_t evaluator_inputs = 0;
    uint32_t wire_count = 0;
    std::vector<Gate> gates;
    std::vector<uint32_t> outputs;

    uint32_t input_count() const { return generator_inputs + evaluator_inputs; }
    // gates carrying a garbled table (AND/OR; XOR/NOT/CONST are free)
    size_t table_gate_count() const;
    void validate() const;

    std::string to_text() const;
    static BooleanCircuit from_text(std::string_view text);
};

std::vector<uint8_t> plain_eval(const BooleanCircuit& c, const std::vector<uint8_t>& gen_bits,
                                const std::vector<uint8_t>& eval_bits);

// Append-only builder; constants are deduplicated per bit value.
class CircuitBuilder {
public:
    std::vector<uint32_t> add_generator_inputs(size_t n);
    std::vector<uint32_t> add_evaluator_inputs(size_t n);

    uint32_t and_gate(uint32_t a, uint32_t b);
    uint32_t or_gate(uint32_t a, uint32_t b);
    uint32_t xor_gate(uint32_t a, uint32_t b);
    uint32_t not_gate(uint32_t a);
    uint32_t constant(bool v);

    void mark_output(uint32_t w);
    const BooleanCircuit& peek() const { return c_; }
    BooleanCircuit take();

private:
    uint32_t emit(GateKind k, uint32_t a, uint32_t b);
    BooleanCircuit c_;
    bool inputs_frozen_ = false;
    int32_t const_wire_[2] = {-1, -1};
};

}  // namespace sdsa::gc
