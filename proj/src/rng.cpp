#include "sdsa/rng.hpp"

namespace sdsa {

Rng::Rng(uint64_t seed) : gen_(seed) {}

uint64_t Rng::u64() { return gen_(); }

uint64_t Rng::below(uint64_t bound) {
    // rejection sampling to stay unbiased
    uint64_t limit = bound * (UINT64_MAX / bound);
    uint64_t v;
    do {
        v = gen_();
    } while (v >= limit);
    return v % bound;
}

Bytes Rng::bytes(size_t n) {
    Bytes out(n);
    size_t i = 0;
    while (i + 8 <= n) {
        uint64_t v = gen_();
        for (int k = 0; k < 8; k++) out[i++] = uint8_t(v >> (8 * k));
    }
    if (i < n) {
        uint64_t v = gen_();
        while (i < n) {
            out[i++] = uint8_t(v);
            v >>= 8;
        }
    }
    return out;
}

mpz_class Rng::mpz_below(const mpz_class& bound) {
    size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    mpz_class v;
    do {
        Bytes raw = bytes((bits + 7) / 8);
        mpz_import(v.get_mpz_t(), raw.size(), 1, 1, 0, 0, raw.data());
        mpz_fdiv_r_2exp(v.get_mpz_t(), v.get_mpz_t(), bits);
    } while (v >= bound);
    return v;
}

mpz_class Rng::mpz_bits(unsigned bits) {
    mpz_class v = mpz_below(mpz_class(1) << bits);
    mpz_setbit(v.get_mpz_t(), bits - 1);
    return v;
}

mpz_class Rng::prime(unsigned bits) {
    for (;;) {
        mpz_class cand = mpz_bits(bits);
        mpz_setbit(cand.get_mpz_t(), 0);
        if (mpz_probab_prime_p(cand.get_mpz_t(), 40)) return cand;
    }
}

}  // namespace sdsa
