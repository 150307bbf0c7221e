#include "sdsa/paillier.hpp"

#include <set>

#include "doctest.h"
#include "oracles.hpp"

using namespace sdsa;
using namespace sdsa::paillier;

TEST_CASE("keygen from fixed small primes") {
    KeyPair kp = keygen_from_primes(5, 7);
    CHECK(kp.pk.n == 35);
    CHECK(kp.pk.g == 36);
    CHECK(kp.sk.lambda == 12);  // lcm(4, 6)
    CHECK(kp.pk.n_squared == 1225);
}

TEST_CASE("keygen produces the requested modulus size") {
    Rng rng(7);
    KeyPair kp = keygen(512, rng);
    CHECK(mpz_sizeinbase(kp.pk.n.get_mpz_t(), 2) == 512);
    CHECK(kp.pk.g == kp.pk.n + 1);
    // mu exists by construction
    CHECK(kp.sk.mu != 0);

    KeyPair big = keygen(1024, rng);
    CHECK(mpz_sizeinbase(big.pk.n.get_mpz_t(), 2) == 1024);
}

TEST_CASE("keygen rejects bad sizes") {
    Rng rng(1);
    CHECK_THROWS_AS(keygen(8, rng), key_error);
    CHECK_THROWS_AS(keygen(17, rng), key_error);
}

TEST_CASE("exhaustive roundtrip over Z_15") {
    KeyPair kp = keygen_from_primes(3, 5);
    Rng rng(11);
    for (unsigned m = 0; m < 15; m++) {
        Ciphertext c = encrypt(kp.pk, m, rng);
        CHECK(decrypt(kp.sk, c) == m);
    }
}

TEST_CASE("encryption is randomized, decryption agrees") {
    KeyPair kp = keygen_from_primes(3, 5);
    Rng rng(13);
    Ciphertext c1 = encrypt(kp.pk, 7, rng);
    Ciphertext c2 = encrypt(kp.pk, 7, rng);
    CHECK(c1.c != c2.c);
    CHECK(decrypt(kp.sk, c1) == 7);
    CHECK(decrypt(kp.sk, c2) == 7);

    CHECK(decrypt(kp.sk, encrypt(kp.pk, 0, rng)) == 0);
    CHECK(decrypt(kp.sk, encrypt(kp.pk, 14, rng)) == 14);  // n - 1 boundary
}

TEST_CASE("plaintext domain is checked") {
    KeyPair kp = keygen_from_primes(3, 5);
    Rng rng(17);
    CHECK_THROWS_AS(encrypt(kp.pk, 15, rng), domain_error);
    CHECK_THROWS_AS(encrypt(kp.pk, -1, rng), domain_error);
}

TEST_CASE("malformed ciphertexts are rejected") {
    KeyPair kp = keygen_from_primes(3, 5);
    CHECK_THROWS_AS(decrypt(kp.sk, Ciphertext{15}), ciphertext_error);   // shares factor with n^2
    CHECK_THROWS_AS(decrypt(kp.sk, Ciphertext{0}), ciphertext_error);
    CHECK_THROWS_AS(decrypt(kp.sk, Ciphertext{225}), ciphertext_error);  // out of range
}

TEST_CASE("homomorphic addition") {
    KeyPair kp = keygen_from_primes(3, 5);
    Rng rng(19);
    auto add_dec = [&](unsigned a, unsigned b) {
        return decrypt(kp.sk,
                       homomorphic_add(kp.pk, encrypt(kp.pk, a, rng), encrypt(kp.pk, b, rng)));
    };
    CHECK(add_dec(2, 3) == 5);
    CHECK(add_dec(9, 0) == 9);    // additive identity
    CHECK(add_dec(14, 1) == 0);   // wraparound mod n
    CHECK(decrypt(kp.sk, homomorphic_add(kp.pk, encrypt(kp.pk, 0, rng),
                                         encrypt(kp.pk, 0, rng))) == 0);
}

TEST_CASE("scalar multiplication") {
    KeyPair kp = keygen_from_primes(3, 5);
    Rng rng(23);
    Ciphertext c = encrypt(kp.pk, 6, rng);
    CHECK(decrypt(kp.sk, scalar_mul(kp.pk, c, 1)) == 6);
    CHECK(decrypt(kp.sk, scalar_mul(kp.pk, c, 0)) == 0);
    CHECK(decrypt(kp.sk, scalar_mul(kp.pk, c, 7)) == 12);  // 42 mod 15
    CHECK_THROWS_AS(scalar_mul(kp.pk, c, -2), domain_error);
}

TEST_CASE("self-blinding preserves the message and changes the ciphertext") {
    Rng rng(29);
    KeyPair kp = keygen(512, rng);
    Ciphertext c = encrypt(kp.pk, 1234, rng);
    Ciphertext b1 = self_blind(kp.pk, c, rng);
    Ciphertext b2 = self_blind(kp.pk, b1, rng);
    CHECK(b1.c != c.c);
    CHECK(decrypt(kp.sk, b1) == 1234);
    CHECK(decrypt(kp.sk, b2) == 1234);

    std::set<mpz_class> seen;
    seen.insert(c.c);
    Ciphertext cur = c;
    for (int i = 0; i < 100; i++) {
        cur = self_blind(kp.pk, cur, rng);
        CHECK(seen.insert(cur.c).second);  // pairwise distinct
    }
    CHECK(decrypt(kp.sk, cur) == 1234);
}

TEST_CASE("randomized properties at 512 bits") {
    Rng rng(31);
    KeyPair kp = keygen(512, rng);
    for (int i = 0; i < 50; i++) {
        mpz_class m1 = rng.mpz_below(kp.pk.n);
        mpz_class m2 = rng.mpz_below(kp.pk.n);
        Ciphertext c1 = encrypt(kp.pk, m1, rng);
        Ciphertext c2 = encrypt(kp.pk, m2, rng);
        CHECK(decrypt(kp.sk, c1) == m1);
        CHECK(decrypt(kp.sk, homomorphic_add(kp.pk, c1, c2)) == (m1 + m2) % kp.pk.n);
        mpz_class k = rng.mpz_below(1000);
        CHECK(decrypt(kp.sk, scalar_mul(kp.pk, c1, k)) == (k * m1) % kp.pk.n);
        CHECK(decrypt(kp.sk, self_blind(kp.pk, c1, rng)) == m1);
    }
}

TEST_CASE("keys and ciphertexts roundtrip through serialization") {
    Rng rng(37);
    KeyPair kp = keygen(512, rng);
    Ciphertext c = encrypt(kp.pk, 42, rng);

    Bytes pk_bytes = kp.pk.serialize();
    ByteReader r1(pk_bytes);
    PublicKey pk2 = PublicKey::deserialize(r1);
    CHECK(pk2 == kp.pk);

    Bytes sk_bytes = kp.sk.serialize();
    ByteReader r2(sk_bytes);
    SecretKey sk2 = SecretKey::deserialize(r2);
    CHECK(decrypt(sk2, c) == 42);

    Bytes ct_bytes = c.serialize();
    ByteReader r3(ct_bytes);
    CHECK(Ciphertext::deserialize(r3) == c);
}
