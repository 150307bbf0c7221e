#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>

#include "sdsa/bytes.hpp"

namespace sdsa {

// Seedable randomness source backing every randomized operation.
// One instance per thread of control; not internally synchronized.
class Rng {
public:
    explicit Rng(uint64_t seed = std::random_device{}());

    uint64_t u64();
    // uniform in [0, bound)
    uint64_t below(uint64_t bound);
    Bytes bytes(size_t n);

    // uniform in [0, bound)
    mpz_class mpz_below(const mpz_class& bound);
    // uniform with exactly `bits` bits (top bit set)
    mpz_class mpz_bits(unsigned bits);
    // odd prime of exactly `bits` bits, >= 40 Miller-Rabin rounds
    mpz_class prime(unsigned bits);

private:
    std::mt19937_64 gen_;
};

}  // namespace sdsa
