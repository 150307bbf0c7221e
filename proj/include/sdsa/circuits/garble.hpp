#pragma once

#include <array>
#include <cstdint>

#include "sdsa/bytes.hpp"
#include "sdsa/circuits/boolean_circuit.hpp"
#include "sdsa/rng.hpp"

namespace sdsa::gc {

struct garble_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct decode_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr size_t kLabelBytes = 16;  // 128-bit wire labels
inline constexpr size_t kTagBytes = 8;     // redundancy tag inside each row
inline constexpr size_t kRowBytes = kLabelBytes + kTagBytes;

struct WireLabel {
    std::array<uint8_t, kLabelBytes> k{};

    bool color() const { return k[0] & 1; }  // point-and-permute bit
    WireLabel operator^(const WireLabel& o) const {
        WireLabel r;
        for (size_t i = 0; i < kLabelBytes; i++) r.k[i] = k[i] ^ o.k[i];
        return r;
    }
    bool operator==(const WireLabel&) const = default;
    static WireLabel random(Rng& rng);
};

struct LabelPair {
    WireLabel l0, l1;  // encode bit 0 / bit 1
    const WireLabel& of(bool b) const { return b ? l1 : l0; }
};

// Four dual-key encrypted rows, indexed by the input labels' color bits.
struct GarbledGate {
    std::array<std::array<uint8_t, kRowBytes>, 4> rows;
};

// Everything the evaluator needs beyond the (public) circuit structure.
struct GarbledCircuit {
    struct OutputEntry {
        std::array<uint8_t, kTagBytes> h0, h1;
    };
    std::vector<GarbledGate> tables;  // one per AND/OR gate, in gate order
    std::vector<WireLabel> const_labels;  // active label per CONST gate, in gate order
    std::vector<OutputEntry> decoding;    // one per output wire

    Bytes serialize() const;
    static GarbledCircuit deserialize(ByteReader& r);
};

struct GarbleResult {
    GarbledCircuit gc;
    std::vector<LabelPair> generator_inputs;
    std::vector<LabelPair> evaluator_inputs;
};

// Free-XOR garbling with point-and-permute; rows are keyed hashes of the two
// input labels XORed with (output label || zero tag).
GarbleResult garble(const BooleanCircuit& c, Rng& rng);

// Encode a party's plaintext bits as labels.
std::vector<WireLabel> garble_inputs(const std::vector<LabelPair>& pairs,
                                     const std::vector<uint8_t>& bits);

// Walk the circuit on labels; throws garble_error if no row decrypts.
std::vector<WireLabel> evaluate(const BooleanCircuit& c, const GarbledCircuit& gc,
                                const std::vector<WireLabel>& gen_labels,
                                const std::vector<WireLabel>& eval_labels);

// Map output labels back to bits; throws decode_error on an unknown label.
std::vector<uint8_t> decode(const GarbledCircuit& gc,
                            const std::vector<WireLabel>& output_labels);

}  // namespace sdsa::gc
