#include "sdsa/circuits/boolean_circuit.hpp"

#include <sstream>

namespace sdsa::gc {

size_t BooleanCircuit::table_gate_count() const {
    size_t n = 0;
    for (const Gate& g : gates)
        if (g.kind == GateKind::And || g.kind == GateKind::Or) n++;
    return n;
}

void BooleanCircuit::validate() const {
    uint32_t next = input_count();
    for (const Gate& g : gates) {
        switch (g.kind) {
            case GateKind::And:
            case GateKind::Or:
            case GateKind::Xor:
                if (g.in0 >= next || g.in1 >= next)
                    throw circuit_error("gate reads an undefined wire");
                break;
            case GateKind::Not:
                if (g.in0 >= next) throw circuit_error("gate reads an undefined wire");
                break;
            case GateKind::Const:
                if (g.in0 > 1) throw circuit_error("const gate bit must be 0 or 1");
                break;
        }
        if (g.out != next) throw circuit_error("gate outputs must be consecutive fresh wires");
        next++;
    }
    if (next != wire_count) throw circuit_error("wire count mismatch");
    for (uint32_t w : outputs)
        if (w >= wire_count) throw circuit_error("output names an undefined wire");
}

std::vector<uint8_t> plain_eval(const BooleanCircuit& c, const std::vector<uint8_t>& gen_bits,
                                const std::vector<uint8_t>& eval_bits) {
    if (gen_bits.size() != c.generator_inputs || eval_bits.size() != c.evaluator_inputs)
        throw circuit_error("input bit count mismatch");
    std::vector<uint8_t> w(c.wire_count, 0);
    for (size_t i = 0; i < gen_bits.size(); i++) w[i] = gen_bits[i] & 1;
    for (size_t i = 0; i < eval_bits.size(); i++) w[c.generator_inputs + i] = eval_bits[i] & 1;
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case GateKind::And: w[g.out] = w[g.in0] & w[g.in1]; break;
            case GateKind::Or: w[g.out] = w[g.in0] | w[g.in1]; break;
            case GateKind::Xor: w[g.out] = w[g.in0] ^ w[g.in1]; break;
            case GateKind::Not: w[g.out] = w[g.in0] ^ 1; break;
            case GateKind::Const: w[g.out] = uint8_t(g.in0); break;
        }
    }
    std::vector<uint8_t> out;
    out.reserve(c.outputs.size());
    for (uint32_t ow : c.outputs) out.push_back(w[ow]);
    return out;
}

namespace {
const char* kind_name(GateKind k) {
    switch (k) {
        case GateKind::And: return "AND";
        case GateKind::Or: return "OR";
        case GateKind::Xor: return "XOR";
        case GateKind::Not: return "NOT";
        case GateKind::Const: return "CONST";
    }
    return "?";
}
}  // namespace

std::string BooleanCircuit::to_text() const {
    std::ostringstream os;
    os << "INPUTS " << generator_inputs << ' ' << evaluator_inputs << '\n';
    for (const Gate& g : gates)
        os << "GATE " << kind_name(g.kind) << ' ' << g.in0 << ' ' << g.in1 << ' ' << g.out
           << '\n';
    for (uint32_t w : outputs) os << "OUT " << w << '\n';
    return os.str();
}

BooleanCircuit BooleanCircuit::from_text(std::string_view text) {
    BooleanCircuit c;
    std::istringstream is{std::string(text)};
    std::string line;
    bool saw_inputs = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "INPUTS") {
            ls >> c.generator_inputs >> c.evaluator_inputs;
            c.wire_count = c.input_count();
            saw_inputs = true;
        } else if (tok == "GATE") {
            if (!saw_inputs) throw circuit_error("GATE before INPUTS line");
            std::string kind;
            Gate g{};
            ls >> kind >> g.in0 >> g.in1 >> g.out;
            if (!ls) throw circuit_error("malformed GATE line: " + line);
            if (kind == "AND") g.kind = GateKind::And;
            else if (kind == "OR") g.kind = GateKind::Or;
            else if (kind == "XOR") g.kind = GateKind::Xor;
            else if (kind == "NOT") g.kind = GateKind::Not;
            else if (kind == "CONST") g.kind = GateKind::Const;
            else throw circuit_error("unknown gate kind: " + kind);
            c.gates.push_back(g);
            c.wire_count++;
        } else if (tok == "OUT") {
            uint32_t w;
            ls >> w;
            c.outputs.push_back(w);
        } else {
            throw circuit_error("unknown line: " + line);
        }
    }
    c.validate();
    return c;
}

std::vector<uint32_t> CircuitBuilder::add_generator_inputs(size_t n) {
    if (inputs_frozen_) throw circuit_error("inputs must be declared before gates");
    std::vector<uint32_t> ws(n);
    // generator inputs sit in the low wire range: insertion before evaluator
    // inputs is only legal while no evaluator inputs or gates exist yet
    if (c_.evaluator_inputs != 0)
        throw circuit_error("declare all generator inputs before evaluator inputs");
    for (size_t i = 0; i < n; i++) ws[i] = c_.generator_inputs + uint32_t(i);
    c_.generator_inputs += uint32_t(n);
    c_.wire_count += uint32_t(n);
    return ws;
}

std::vector<uint32_t> CircuitBuilder::add_evaluator_inputs(size_t n) {
    if (inputs_frozen_) throw circuit_error("inputs must be declared before gates");
    std::vector<uint32_t> ws(n);
    for (size_t i = 0; i < n; i++)
        ws[i] = c_.generator_inputs + c_.evaluator_inputs + uint32_t(i);
    c_.evaluator_inputs += uint32_t(n);
    c_.wire_count += uint32_t(n);
    return ws;
}

uint32_t CircuitBuilder::emit(GateKind k, uint32_t a, uint32_t b) {
    inputs_frozen_ = true;
    uint32_t out = c_.wire_count++;
    c_.gates.push_back(Gate{k, a, b, out});
    return out;
}

uint32_t CircuitBuilder::and_gate(uint32_t a, uint32_t b) { return emit(GateKind::And, a, b); }
uint32_t CircuitBuilder::or_gate(uint32_t a, uint32_t b) { return emit(GateKind::Or, a, b); }
uint32_t CircuitBuilder::xor_gate(uint32_t a, uint32_t b) { return emit(GateKind::Xor, a, b); }
uint32_t CircuitBuilder::not_gate(uint32_t a) { return emit(GateKind::Not, a, a); }

uint32_t CircuitBuilder::constant(bool v) {
    if (const_wire_[v] < 0) const_wire_[v] = int32_t(emit(GateKind::Const, v ? 1 : 0, 0));
    return uint32_t(const_wire_[v]);
}

void CircuitBuilder::mark_output(uint32_t w) {
    if (w >= c_.wire_count) throw circuit_error("output names an undefined wire");
    c_.outputs.push_back(w);
}

BooleanCircuit CircuitBuilder::take() {
    c_.validate();
    return std::move(c_);
}

}  // namespace sdsa::gc
