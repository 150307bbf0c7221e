#include "sdsa/jointenc.hpp"

#include <array>

namespace sdsa::jointenc {

namespace {

// wire registry of supported layouts
constexpr std::array<std::pair<unsigned, unsigned>, 9> kLayouts = {{
    {8, 12},
    {8, 81},
    {12, 81},
    {16, 12},
    {16, 40},
    {16, 81},
    {24, 81},
    {32, 40},
    {32, 81},
}};

}  // namespace

uint8_t PlaintextLayout::tag() const {
    for (size_t i = 0; i < kLayouts.size(); i++)
        if (kLayouts[i].first == value_bits && kLayouts[i].second == rand_bits)
            return uint8_t(i);
    throw config_error("layout not registered for serialization");
}

PlaintextLayout PlaintextLayout::from_tag(uint8_t tag) {
    if (tag >= kLayouts.size()) throw codec_error("unknown layout tag");
    return PlaintextLayout{kLayouts[tag].first, kLayouts[tag].second};
}

void validate_layout(const PlaintextLayout& layout, const paillier::PublicKey& pk1,
                     const paillier::PublicKey& pk2) {
    mpz_class combined = mpz_class(1) << (layout.value_bits + layout.rand_bits);
    if (combined >= pk1.n || combined >= pk2.n)
        throw config_error("2^(K+K') must be below both moduli");
}

mpz_class apply_randomization(const mpz_class& value, const PlaintextLayout& layout,
                              const mpz_class& r) {
    if (r < 1 || r >= layout.rand_field_limit())
        throw config_error("randomization draw outside [1, 2^K')");
    return value + (r << layout.value_bits);
}

mpz_class add_randomization(const mpz_class& value, const PlaintextLayout& layout, Rng& rng) {
    mpz_class r = rng.mpz_below(layout.rand_field_limit() - 1) + 1;
    return apply_randomization(value, layout, r);
}

JointCiphertext joint_encrypt_external_with(const paillier::Ciphertext& x_under_pk2,
                                            const paillier::PublicKey& pk1,
                                            const paillier::PublicKey& pk2,
                                            const PlaintextLayout& layout, const mpz_class& s,
                                            const mpz_class& r1, const mpz_class& r2, Rng& rng) {
    validate_layout(layout, pk1, pk2);
    mpz_class two_k = layout.modulus();

    // share 1 is s, share 2 is x + 2^K - s (carry lands in the field above)
    mpz_class m1 = apply_randomization(s, layout, r1);
    paillier::Ciphertext part1 = paillier::encrypt(pk1, m1, rng);

    mpz_class m2_delta = apply_randomization(two_k - s, layout, r2);
    paillier::Ciphertext part2 =
        paillier::homomorphic_add(pk2, x_under_pk2, paillier::encrypt(pk2, m2_delta, rng));

    return JointCiphertext{part1, part2, layout, 1};
}

JointCiphertext joint_encrypt_external(const paillier::Ciphertext& x_under_pk2,
                                       const paillier::PublicKey& pk1,
                                       const paillier::PublicKey& pk2,
                                       const PlaintextLayout& layout, Rng& rng) {
    mpz_class s = rng.mpz_below(layout.modulus());
    mpz_class r1 = rng.mpz_below(layout.rand_field_limit() - 1) + 1;
    mpz_class r2 = rng.mpz_below(layout.rand_field_limit() - 1) + 1;
    return joint_encrypt_external_with(x_under_pk2, pk1, pk2, layout, s, r1, r2, rng);
}

JointCiphertext joint_encrypt_known(uint64_t x, const paillier::PublicKey& pk1,
                                    const paillier::PublicKey& pk2,
                                    const PlaintextLayout& layout, Rng& rng) {
    validate_layout(layout, pk1, pk2);
    mpz_class two_k = layout.modulus();
    mpz_class xv(static_cast<unsigned long>(x));
    if (xv >= two_k) throw config_error("value outside Z_2^K");

    mpz_class s = rng.mpz_below(two_k);
    mpz_class m1 = add_randomization(s, layout, rng);
    mpz_class m2 = add_randomization(xv + two_k - s, layout, rng);
    return JointCiphertext{paillier::encrypt(pk1, m1, rng), paillier::encrypt(pk2, m2, rng),
                           layout, 1};
}

JointCiphertext ss_blind(const JointCiphertext& jc, const paillier::PublicKey& pk1,
                         const paillier::PublicKey& pk2, Rng& rng) {
    JointCiphertext zero = joint_encrypt_known(0, pk1, pk2, jc.layout, rng);
    return joint_add(jc, zero, pk1, pk2);
}

JointCiphertext joint_add(const JointCiphertext& a, const JointCiphertext& b,
                          const paillier::PublicKey& pk1, const paillier::PublicKey& pk2) {
    if (!(a.layout == b.layout)) throw config_error("layout mismatch in joint_add");
    uint64_t units = uint64_t(a.field_units) + b.field_units;
    if (units - 1 > add_budget(a.layout, pk1, pk2))
        throw field_overflow_error("randomization fields need a reshare before more additions");
    JointCiphertext out;
    out.part1 = paillier::homomorphic_add(pk1, a.part1, b.part1);
    out.part2 = paillier::homomorphic_add(pk2, a.part2, b.part2);
    out.layout = a.layout;
    out.field_units = uint32_t(units);
    return out;
}

JointCiphertext joint_scalar_mul(const JointCiphertext& jc, uint64_t k,
                                 const paillier::PublicKey& pk1,
                                 const paillier::PublicKey& pk2) {
    if (k == 0) throw config_error("scalar must be >= 1");
    uint64_t units = uint64_t(jc.field_units) * k;
    if (units - 1 > add_budget(jc.layout, pk1, pk2))
        throw field_overflow_error("randomization fields need a reshare before more additions");
    JointCiphertext out;
    out.part1 = paillier::scalar_mul(pk1, jc.part1, mpz_class(static_cast<unsigned long>(k)));
    out.part2 = paillier::scalar_mul(pk2, jc.part2, mpz_class(static_cast<unsigned long>(k)));
    out.layout = jc.layout;
    out.field_units = uint32_t(units);
    return out;
}

mpz_class decrypt_part_raw(const JointCiphertext& jc, const paillier::SecretKey& sk, int party) {
    if (party != 1 && party != 2) throw config_error("party must be 1 or 2");
    return paillier::decrypt(sk, party == 1 ? jc.part1 : jc.part2);
}

Share decrypt_share(const JointCiphertext& jc, const paillier::SecretKey& sk, int party) {
    mpz_class raw = decrypt_part_raw(jc, sk, party);
    mpz_class v;
    mpz_fdiv_r_2exp(v.get_mpz_t(), raw.get_mpz_t(), jc.layout.value_bits);
    return Share{v.get_ui(), party};
}

uint64_t share_from_part(const paillier::SecretKey& sk, const paillier::Ciphertext& part,
                         const PlaintextLayout& layout) {
    mpz_class raw = paillier::decrypt(sk, part);
    mpz_class v;
    mpz_fdiv_r_2exp(v.get_mpz_t(), raw.get_mpz_t(), layout.value_bits);
    return v.get_ui();
}

uint64_t reconstruct(const Share& s1, const Share& s2, const PlaintextLayout& layout) {
    uint64_t mask = (layout.value_bits >= 64) ? ~uint64_t(0)
                                              : ((uint64_t(1) << layout.value_bits) - 1);
    return (s1.value + s2.value) & mask;
}

uint64_t add_budget(const PlaintextLayout& layout, const paillier::PublicKey& pk1,
                    const paillier::PublicKey& pk2) {
    const mpz_class& n_min = pk1.n < pk2.n ? pk1.n : pk2.n;
    mpz_class hard = n_min >> (layout.value_bits + layout.rand_bits + 1);
    uint64_t hard_cap =
        hard > mpz_class(UINT64_MAX) ? UINT64_MAX : (hard == 0 ? 1 : hard.get_ui());
    if (layout.rand_bits > layout.value_bits + 1) {
        unsigned shift = layout.rand_bits - layout.value_bits - 1;
        uint64_t policy = shift >= 64 ? UINT64_MAX : (uint64_t(1) << shift);
        return std::min(policy, hard_cap);
    }
    return std::min<uint64_t>(1, hard_cap);
}

Bytes JointCiphertext::serialize() const {
    Bytes out;
    Bytes p1 = part1.serialize();
    Bytes p2 = part2.serialize();
    out.insert(out.end(), p1.begin(), p1.end());
    out.insert(out.end(), p2.begin(), p2.end());
    put_u8(out, layout.tag());
    return out;
}

JointCiphertext JointCiphertext::deserialize(ByteReader& r) {
    JointCiphertext jc;
    jc.part1 = paillier::Ciphertext::deserialize(r);
    jc.part2 = paillier::Ciphertext::deserialize(r);
    jc.layout = PlaintextLayout::from_tag(r.u8());
    jc.field_units = 1;
    return jc;
}

}  // namespace sdsa::jointenc
