#include "sdsa/circuits/garble.hpp"

#include <openssl/sha.h>

#include <cstring>

namespace sdsa::gc {

namespace {

// H(A, B, gate index) -> kRowBytes pad
std::array<uint8_t, kRowBytes> row_pad(const WireLabel& a, const WireLabel& b, uint64_t gate) {
    uint8_t buf[2 * kLabelBytes + 8];
    std::memcpy(buf, a.k.data(), kLabelBytes);
    std::memcpy(buf + kLabelBytes, b.k.data(), kLabelBytes);
    for (int i = 0; i < 8; i++) buf[2 * kLabelBytes + i] = uint8_t(gate >> (8 * i));
    uint8_t digest[SHA256_DIGEST_LENGTH];
    SHA256(buf, sizeof buf, digest);
    std::array<uint8_t, kRowBytes> out;
    std::memcpy(out.data(), digest, kRowBytes);
    return out;
}

std::array<uint8_t, kTagBytes> output_hash(const WireLabel& l, uint32_t output_index) {
    uint8_t buf[kLabelBytes + 8];
    std::memcpy(buf, l.k.data(), kLabelBytes);
    buf[kLabelBytes] = 'o';
    buf[kLabelBytes + 1] = 'u';
    buf[kLabelBytes + 2] = 't';
    buf[kLabelBytes + 3] = 0;
    for (int i = 0; i < 4; i++) buf[kLabelBytes + 4 + i] = uint8_t(output_index >> (8 * i));
    uint8_t digest[SHA256_DIGEST_LENGTH];
    SHA256(buf, sizeof buf, digest);
    std::array<uint8_t, kTagBytes> out;
    std::memcpy(out.data(), digest, kTagBytes);
    return out;
}

uint8_t gate_fn(GateKind k, uint8_t a, uint8_t b) {
    return k == GateKind::And ? (a & b) : (a | b);
}

}  // namespace

WireLabel WireLabel::random(Rng& rng) {
    WireLabel l;
    Bytes raw = rng.bytes(kLabelBytes);
    std::copy(raw.begin(), raw.end(), l.k.begin());
    return l;
}

GarbleResult garble(const BooleanCircuit& c, Rng& rng) {
    c.validate();

    // global free-XOR offset; odd so the two labels of a wire differ in color
    WireLabel delta = WireLabel::random(rng);
    delta.k[0] |= 1;

    std::vector<WireLabel> zero(c.wire_count);  // label encoding bit 0 per wire
    auto pair_of = [&](uint32_t w) { return LabelPair{zero[w], zero[w] ^ delta}; };

    for (uint32_t w = 0; w < c.input_count(); w++) zero[w] = WireLabel::random(rng);

    GarbleResult res;
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case GateKind::Xor:
                zero[g.out] = zero[g.in0] ^ zero[g.in1];
                break;
            case GateKind::Not:
                // swap label roles; the evaluator passes labels through
                zero[g.out] = zero[g.in0] ^ delta;
                break;
            case GateKind::Const: {
                zero[g.out] = WireLabel::random(rng);
                res.gc.const_labels.push_back(g.in0 ? (zero[g.out] ^ delta) : zero[g.out]);
                break;
            }
            case GateKind::And:
            case GateKind::Or: {
                zero[g.out] = WireLabel::random(rng);
                GarbledGate gg;
                LabelPair in0 = pair_of(g.in0), in1 = pair_of(g.in1), out = pair_of(g.out);
                uint64_t gate_index = uint64_t(&g - c.gates.data());
                for (uint8_t ca = 0; ca < 2; ca++) {
                    for (uint8_t cb = 0; cb < 2; cb++) {
                        // the labels whose color bits are (ca, cb)
                        uint8_t bit_a = ca ^ uint8_t(in0.l0.color());
                        uint8_t bit_b = cb ^ uint8_t(in1.l0.color());
                        const WireLabel& la = in0.of(bit_a);
                        const WireLabel& lb = in1.of(bit_b);
                        const WireLabel& lo = out.of(gate_fn(g.kind, bit_a, bit_b));
                        auto pad = row_pad(la, lb, gate_index);
                        auto& row = gg.rows[ca * 2 + cb];
                        for (size_t i = 0; i < kLabelBytes; i++) row[i] = pad[i] ^ lo.k[i];
                        for (size_t i = kLabelBytes; i < kRowBytes; i++) row[i] = pad[i];
                    }
                }
                res.gc.tables.push_back(gg);
                break;
            }
        }
    }

    for (size_t idx = 0; idx < c.outputs.size(); idx++) {
        LabelPair p = pair_of(c.outputs[idx]);
        res.gc.decoding.push_back(
            {output_hash(p.l0, uint32_t(idx)), output_hash(p.l1, uint32_t(idx))});
    }
    for (uint32_t w = 0; w < c.generator_inputs; w++)
        res.generator_inputs.push_back(pair_of(w));
    for (uint32_t w = c.generator_inputs; w < c.input_count(); w++)
        res.evaluator_inputs.push_back(pair_of(w));
    return res;
}

std::vector<WireLabel> garble_inputs(const std::vector<LabelPair>& pairs,
                                     const std::vector<uint8_t>& bits) {
    if (pairs.size() != bits.size()) throw garble_error("input length mismatch");
    std::vector<WireLabel> out;
    out.reserve(bits.size());
    for (size_t i = 0; i < bits.size(); i++) out.push_back(pairs[i].of(bits[i] & 1));
    return out;
}

std::vector<WireLabel> evaluate(const BooleanCircuit& c, const GarbledCircuit& gc,
                                const std::vector<WireLabel>& gen_labels,
                                const std::vector<WireLabel>& eval_labels) {
    if (gen_labels.size() != c.generator_inputs || eval_labels.size() != c.evaluator_inputs)
        throw garble_error("input label count mismatch");
    std::vector<WireLabel> w(c.wire_count);
    for (size_t i = 0; i < gen_labels.size(); i++) w[i] = gen_labels[i];
    for (size_t i = 0; i < eval_labels.size(); i++) w[c.generator_inputs + i] = eval_labels[i];

    size_t table_i = 0, const_i = 0;
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case GateKind::Xor: w[g.out] = w[g.in0] ^ w[g.in1]; break;
            case GateKind::Not: w[g.out] = w[g.in0]; break;
            case GateKind::Const:
                if (const_i >= gc.const_labels.size())
                    throw garble_error("garbled circuit missing const labels");
                w[g.out] = gc.const_labels[const_i++];
                break;
            case GateKind::And:
            case GateKind::Or: {
                if (table_i >= gc.tables.size())
                    throw garble_error("garbled circuit missing gate tables");
                const GarbledGate& gg = gc.tables[table_i++];
                uint64_t gate_index = uint64_t(&g - c.gates.data());
                auto pad = row_pad(w[g.in0], w[g.in1], gate_index);
                const auto& row = gg.rows[(w[g.in0].color() ? 2 : 0) + (w[g.in1].color() ? 1 : 0)];
                for (size_t i = kLabelBytes; i < kRowBytes; i++)
                    if ((pad[i] ^ row[i]) != 0)
                        throw garble_error("row tag check failed; corrupted circuit or labels");
                for (size_t i = 0; i < kLabelBytes; i++) w[g.out].k[i] = pad[i] ^ row[i];
                break;
            }
        }
    }
    std::vector<WireLabel> out;
    out.reserve(c.outputs.size());
    for (uint32_t ow : c.outputs) out.push_back(w[ow]);
    return out;
}

std::vector<uint8_t> decode(const GarbledCircuit& gc,
                            const std::vector<WireLabel>& output_labels) {
    if (output_labels.size() != gc.decoding.size())
        throw decode_error("output label count mismatch");
    std::vector<uint8_t> bits(output_labels.size());
    for (size_t i = 0; i < output_labels.size(); i++) {
        auto h = output_hash(output_labels[i], uint32_t(i));
        if (h == gc.decoding[i].h0) bits[i] = 0;
        else if (h == gc.decoding[i].h1) bits[i] = 1;
        else throw decode_error("label not in decoding table");
    }
    return bits;
}

Bytes GarbledCircuit::serialize() const {
    Bytes out;
    put_u32(out, uint32_t(tables.size()));
    for (const GarbledGate& g : tables)
        for (const auto& row : g.rows) out.insert(out.end(), row.begin(), row.end());
    put_u32(out, uint32_t(const_labels.size()));
    for (const WireLabel& l : const_labels) out.insert(out.end(), l.k.begin(), l.k.end());
    put_u32(out, uint32_t(decoding.size()));
    for (const OutputEntry& e : decoding) {
        out.insert(out.end(), e.h0.begin(), e.h0.end());
        out.insert(out.end(), e.h1.begin(), e.h1.end());
    }
    return out;
}

GarbledCircuit GarbledCircuit::deserialize(ByteReader& r) {
    GarbledCircuit gc;
    uint32_t nt = r.u32();
    gc.tables.resize(nt);
    for (uint32_t i = 0; i < nt; i++)
        for (auto& row : gc.tables[i].rows) {
            auto s = r.raw(kRowBytes);
            std::copy(s.begin(), s.end(), row.begin());
        }
    uint32_t nc = r.u32();
    gc.const_labels.resize(nc);
    for (uint32_t i = 0; i < nc; i++) {
        auto s = r.raw(kLabelBytes);
        std::copy(s.begin(), s.end(), gc.const_labels[i].k.begin());
    }
    uint32_t nd = r.u32();
    gc.decoding.resize(nd);
    for (uint32_t i = 0; i < nd; i++) {
        auto s0 = r.raw(kTagBytes);
        std::copy(s0.begin(), s0.end(), gc.decoding[i].h0.begin());
        auto s1 = r.raw(kTagBytes);
        std::copy(s1.begin(), s1.end(), gc.decoding[i].h1.begin());
    }
    return gc;
}

}  // namespace sdsa::gc
