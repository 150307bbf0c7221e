#pragma once

#include <cstdint>
#include <optional>

#include "sdsa/paillier.hpp"

namespace sdsa::jointenc {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct field_overflow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bit budget of a jointly encrypted value: the low `value_bits` hold the
// plaintext field, the next `rand_bits` hold the randomization field.
struct PlaintextLayout {
    unsigned value_bits;  // K
    unsigned rand_bits;   // K'

    mpz_class modulus() const { return mpz_class(1) << value_bits; }  // 2^K
    mpz_class rand_field_limit() const { return mpz_class(1) << rand_bits; }

    // serialization tag; only registered layouts go on the wire
    uint8_t tag() const;
    static PlaintextLayout from_tag(uint8_t tag);

    bool operator==(const PlaintextLayout&) const = default;
};

// requires 2^(K+K') < min(n1, n2)
void validate_layout(const PlaintextLayout& layout, const paillier::PublicKey& pk1,
                     const paillier::PublicKey& pk2);

// One additive share of a jointly encrypted value, reduced mod 2^K.
struct Share {
    uint64_t value;
    int party;  // 1 or 2
};

// Pair of Paillier ciphertexts under the two parties' keys whose plaintexts
// are additive shares (mod 2^K) of one message, each carrying a
// randomization field in the bits above the plaintext field.
struct JointCiphertext {
    paillier::Ciphertext part1;  // under pk1
    paillier::Ciphertext part2;  // under pk2
    PlaintextLayout layout;
    // number of tau-bearing summands accumulated by homomorphic ops
    uint32_t field_units = 1;

    Bytes serialize() const;
    static JointCiphertext deserialize(ByteReader& r);
};

// value + r * 2^K; requires 1 <= r < 2^K'
mpz_class apply_randomization(const mpz_class& value, const PlaintextLayout& layout,
                              const mpz_class& r);
// draws r uniform in [1, 2^K')
mpz_class add_randomization(const mpz_class& value, const PlaintextLayout& layout, Rng& rng);

// Party 1's side of the external-user flow: the user encrypted x under pk2;
// party 1 splits x into shares s and x - s without ever seeing x.
JointCiphertext joint_encrypt_external(const paillier::Ciphertext& x_under_pk2,
                                       const paillier::PublicKey& pk1,
                                       const paillier::PublicKey& pk2,
                                       const PlaintextLayout& layout, Rng& rng);

// Deterministic core of the above with the share and field draws pinned;
// used by tests that assert exact intermediate values.
JointCiphertext joint_encrypt_external_with(const paillier::Ciphertext& x_under_pk2,
                                            const paillier::PublicKey& pk1,
                                            const paillier::PublicKey& pk2,
                                            const PlaintextLayout& layout, const mpz_class& s,
                                            const mpz_class& r1, const mpz_class& r2, Rng& rng);

// Joint encryption of a value known to the caller (either party can do this
// with public keys only); used for null padding and for SS-blinding.
JointCiphertext joint_encrypt_known(uint64_t x, const paillier::PublicKey& pk1,
                                    const paillier::PublicKey& pk2,
                                    const PlaintextLayout& layout, Rng& rng);

// Re-randomizes both ciphertext parts AND the share split; the reconstructed
// value is unchanged mod 2^K. Either party may call this with public keys.
JointCiphertext ss_blind(const JointCiphertext& jc, const paillier::PublicKey& pk1,
                         const paillier::PublicKey& pk2, Rng& rng);

// Reconstructs to x + y mod 2^K. Throws field_overflow_error past the
// layout's addition budget.
JointCiphertext joint_add(const JointCiphertext& a, const JointCiphertext& b,
                          const paillier::PublicKey& pk1, const paillier::PublicKey& pk2);

// Reconstructs to k * x mod 2^K, public k >= 1.
JointCiphertext joint_scalar_mul(const JointCiphertext& jc, uint64_t k,
                                 const paillier::PublicKey& pk1,
                                 const paillier::PublicKey& pk2);

// Party i decrypts its part and strips the randomization field.
Share decrypt_share(const JointCiphertext& jc, const paillier::SecretKey& sk, int party);

// Share extraction from a bare ciphertext part (a party that holds only its
// own half of a joint tuple).
uint64_t share_from_part(const paillier::SecretKey& sk, const paillier::Ciphertext& part,
                         const PlaintextLayout& layout);

// Raw decrypted part value, randomization field included (test oracle hook).
mpz_class decrypt_part_raw(const JointCiphertext& jc, const paillier::SecretKey& sk, int party);

uint64_t reconstruct(const Share& s1, const Share& s2, const PlaintextLayout& layout);

// Additions allowed before a mandatory reshare. Policy bound 2^(K'-K-1)
// where representable, always capped by the hard arithmetic bound
// min(n1,n2) >> (K+K'+1) that keeps summed fields below the moduli.
uint64_t add_budget(const PlaintextLayout& layout, const paillier::PublicKey& pk1,
                    const paillier::PublicKey& pk2);

}  // namespace sdsa::jointenc
