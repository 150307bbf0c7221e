#pragma once

#include <gmpxx.h>

#include <stdexcept>

#include "sdsa/bignum.hpp"
#include "sdsa/rng.hpp"

namespace sdsa::paillier {

struct key_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ciphertext_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PublicKey {
    mpz_class n;
    mpz_class g;
    mpz_class n_squared;

    Bytes serialize() const;
    static PublicKey deserialize(ByteReader& r);
    bool operator==(const PublicKey&) const = default;
};

struct SecretKey {
    mpz_class lambda;  // lcm(p-1, q-1)
    mpz_class mu;      // (L(g^lambda mod n^2))^-1 mod n
    mpz_class n;
    // CRT residues, kept for fast decryption; reconstructible from p, q
    mpz_class p_squared;
    mpz_class q_squared;
    mpz_class q_squared_inv;  // q^-2 mod p^2

    Bytes serialize() const;
    static SecretKey deserialize(ByteReader& r);
};

struct Ciphertext {
    mpz_class c;

    Bytes serialize() const;
    static Ciphertext deserialize(ByteReader& r);
    bool operator==(const Ciphertext&) const = default;
};

struct KeyPair {
    PublicKey pk;
    SecretKey sk;
};

// Probabilistic key generation; key_bits is the bit length of n (>= 16, even).
KeyPair keygen(unsigned key_bits, Rng& rng);

// Deterministic variant from fixed primes, for small-modulus tests.
KeyPair keygen_from_primes(const mpz_class& p, const mpz_class& q);

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, Rng& rng);
mpz_class decrypt(const SecretKey& sk, const Ciphertext& c);

// D(result) = m1 + m2 mod n
Ciphertext homomorphic_add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
// D(result) = k * m mod n, k >= 0
Ciphertext scalar_mul(const PublicKey& pk, const Ciphertext& c, const mpz_class& k);
// fresh randomness, same plaintext
Ciphertext self_blind(const PublicKey& pk, const Ciphertext& c, Rng& rng);

}  // namespace sdsa::paillier
