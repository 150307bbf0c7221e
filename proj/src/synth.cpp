#include "sdsa/synth.hpp"

#include "auction_program.hpp"

namespace sdsa::oblivious {

namespace {

// Emits the program as gates. Bit extraction, shifts, extensions and
// concatenations are pure rewiring and cost nothing.
class CircuitBackend {
public:
    struct Word {
        std::vector<uint32_t> w;  // wire per bit, LSB first
    };

    CircuitBackend(size_t max_gates) : budget_(max_gates) {}

    unsigned width(const Word& a) const { return unsigned(a.w.size()); }

    Word gen_input(unsigned bits) { return Word{b_.add_generator_inputs(bits)}; }
    Word eval_input(unsigned bits) { return Word{b_.add_evaluator_inputs(bits)}; }

    Word constant(uint64_t v, unsigned bits) {
        Word out;
        for (unsigned i = 0; i < bits; i++) out.w.push_back(b_.constant((v >> i) & 1));
        return out;
    }

    Word add(const Word& a, const Word& b) { return adder(a, b, false); }
    Word sub(const Word& a, const Word& b) {
        // a + ~b + 1
        Word nb = bnot(b);
        return adder(a, nb, true);
    }
    Word band(const Word& a, const Word& b) { return zip(a, b, [&](uint32_t x, uint32_t y) {
                                                  return b_.and_gate(x, y);
                                              }); }
    Word bor(const Word& a, const Word& b) { return zip(a, b, [&](uint32_t x, uint32_t y) {
                                                 return b_.or_gate(x, y);
                                             }); }
    Word bxor(const Word& a, const Word& b) { return zip(a, b, [&](uint32_t x, uint32_t y) {
                                                  return b_.xor_gate(x, y);
                                              }); }
    Word bnot(const Word& a) {
        Word out;
        for (uint32_t x : a.w) out.w.push_back(b_.not_gate(x));
        check_budget();
        return out;
    }
    Word mask(const Word& flag, const Word& a) {
        if (flag.w.size() != 1) throw layout_error("mask flag must be one bit");
        Word out;
        for (uint32_t x : a.w) out.w.push_back(b_.and_gate(flag.w[0], x));
        check_budget();
        return out;
    }
    Word gt(const Word& a, const Word& b) {
        // a > b  ==  not (b >= a)
        Word g = ge(b, a);
        return Word{{b_.not_gate(g.w[0])}};
    }
    Word ge(const Word& a, const Word& b) {
        // carry out of a + ~b + 1
        same(a, b);
        uint32_t carry = b_.constant(1);
        for (size_t i = 0; i < a.w.size(); i++) {
            uint32_t nb = b_.not_gate(b.w[i]);
            carry = carry_cell(a.w[i], nb, carry);
        }
        check_budget();
        return Word{{carry}};
    }
    Word eq(const Word& a, const Word& b) {
        Word n = ne(a, b);
        return Word{{b_.not_gate(n.w[0])}};
    }
    Word ne(const Word& a, const Word& b) {
        same(a, b);
        uint32_t acc = b_.xor_gate(a.w[0], b.w[0]);
        for (size_t i = 1; i < a.w.size(); i++)
            acc = b_.or_gate(acc, b_.xor_gate(a.w[i], b.w[i]));
        check_budget();
        return Word{{acc}};
    }
    Word shl(const Word& a, unsigned k) {
        Word out;
        for (unsigned i = 0; i < k && i < a.w.size(); i++) out.w.push_back(b_.constant(false));
        for (unsigned i = 0; out.w.size() < a.w.size(); i++) out.w.push_back(a.w[i]);
        return out;
    }
    Word zext(const Word& a, unsigned bits) {
        if (bits < a.w.size()) throw layout_error("zext must not narrow");
        Word out = a;
        while (out.w.size() < bits) out.w.push_back(b_.constant(false));
        return out;
    }
    Word trunc(const Word& a, unsigned bits) {
        Word out = a;
        out.w.resize(bits);
        return out;
    }
    Word bit(const Word& a, unsigned i) { return Word{{a.w.at(i)}}; }
    Word concat(const Word& hi, const Word& lo) {
        Word out = lo;
        out.w.insert(out.w.end(), hi.w.begin(), hi.w.end());
        return out;
    }
    Word pack(const std::vector<Word>& bits) {
        Word out;
        for (const Word& b : bits) {
            if (b.w.size() != 1) throw layout_error("pack expects single-bit words");
            out.w.push_back(b.w[0]);
        }
        return out;
    }
    void output(const Word& a) {
        for (uint32_t x : a.w) b_.mark_output(x);
    }

    gc::BooleanCircuit take() { return b_.take(); }

private:
    void same(const Word& a, const Word& b) const {
        if (a.w.size() != b.w.size()) throw layout_error("operand width mismatch");
    }
    template <class F>
    Word zip(const Word& a, const Word& b, F f) {
        same(a, b);
        Word out;
        for (size_t i = 0; i < a.w.size(); i++) out.w.push_back(f(a.w[i], b.w[i]));
        check_budget();
        return out;
    }
    // carry' = c xor ((a xor c) and (b xor c)); one table gate per bit
    uint32_t carry_cell(uint32_t a, uint32_t b, uint32_t c) {
        uint32_t t = b_.and_gate(b_.xor_gate(a, c), b_.xor_gate(b, c));
        return b_.xor_gate(c, t);
    }
    Word adder(const Word& a, const Word& b, bool carry_in) {
        same(a, b);
        Word out;
        uint32_t carry = b_.constant(carry_in);
        for (size_t i = 0; i < a.w.size(); i++) {
            out.w.push_back(b_.xor_gate(b_.xor_gate(a.w[i], b.w[i]), carry));
            if (i + 1 < a.w.size()) carry = carry_cell(a.w[i], b.w[i], carry);
        }
        check_budget();
        return out;
    }
    void check_budget() {
        if (b_.peek().gates.size() > budget_)
            throw resource_error("layout exceeds the configured gate budget");
    }

    gc::CircuitBuilder b_;
    size_t budget_;
};

}  // namespace

gc::BooleanCircuit synthesize_circuit(const ObliviousLayout& layout, size_t max_gates) {
    CircuitBackend bk(max_gates);
    detail::auction_program(bk, layout);
    return bk.take();
}

std::vector<uint8_t> share_bits(const ObliviousLayout& layout,
                                const std::vector<uint64_t>& values) {
    if (values.size() != layout.value_count())
        throw layout_error("value count does not match the layout");
    std::vector<uint8_t> bits;
    bits.reserve(values.size() * layout.value_bits);
    for (uint64_t v : values)
        for (unsigned i = 0; i < layout.value_bits; i++) bits.push_back((v >> i) & 1);
    return bits;
}

std::vector<uint64_t> words_from_bits(const ObliviousLayout& layout,
                                      const std::vector<uint8_t>& bits) {
    unsigned w = layout.ext_bits();
    if (bits.size() != layout.output_word_count() * w)
        throw layout_error("output bit count does not match the layout");
    std::vector<uint64_t> words(layout.output_word_count(), 0);
    for (size_t k = 0; k < words.size(); k++)
        for (unsigned i = 0; i < w; i++)
            words[k] |= uint64_t(bits[k * w + i] & 1) << i;
    return words;
}

}  // namespace sdsa::oblivious
