#include "sdsa/circuits/ot.hpp"

#include <openssl/sha.h>

#include <cstring>

#include "sdsa/bignum.hpp"

namespace sdsa::gc {

namespace {

// safe primes generated once with `openssl dhparam`; g = 4 generates the
// order-(p-1)/2 subgroup of quadratic residues
const char* kP512 =
    "a8147fa80dfe4176e2e89cf8d0a0def3ab7f203c7541268c2b4105da744cffc2"
    "f8ea735a98ddfd8bef2546a50e57b71ccee798028411c4c54fc019fc1fbfb76f";

const char* kP1536 =
    "ed4253c875ba67ff6d308a14b46c410f56616fb197ab6827d0c6c8f35024b118"
    "1465c872d299937e3152a7c803bf22f32033f90a60c68ed1bd20858601d056e7"
    "f29b60184fc54d975a3e839a4f5235e3f8fd81c487ed89546ac64fef07d7918e"
    "cd6a0f2ace7bdcda300496796712668fa6442e62f24ac5fadd28fe09fdc0fd2f"
    "887244417d61b6a9f6976e4bbcb4ca441f82e1be84fbae54c4eeda24c9eaffce"
    "f2e19507990ebd18ae436d8fca77a3d19439526c3f116b60b28763c7175bda97";

void put_elem(Bytes& out, const mpz_class& v, size_t elem_bytes) {
    Bytes raw = mpz_to_bytes(v);
    if (raw.size() > elem_bytes) throw transfer_error("element too large for group");
    out.insert(out.end(), elem_bytes - raw.size(), 0);
    out.insert(out.end(), raw.begin(), raw.end());
}

mpz_class read_elem(ByteReader& r, size_t elem_bytes) {
    return mpz_from_bytes(r.raw(elem_bytes));
}

WireLabel key_from_element(const mpz_class& k, size_t elem_bytes, uint32_t index, uint8_t slot) {
    Bytes buf;
    put_elem(buf, k, elem_bytes);
    for (int i = 0; i < 4; i++) buf.push_back(uint8_t(index >> (8 * i)));
    buf.push_back(slot);
    uint8_t digest[SHA256_DIGEST_LENGTH];
    SHA256(buf.data(), buf.size(), digest);
    WireLabel l;
    std::memcpy(l.k.data(), digest, kLabelBytes);
    return l;
}

mpz_class powm(const mpz_class& b, const mpz_class& e, const mpz_class& m) {
    mpz_class out;
    mpz_powm(out.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return out;
}

}  // namespace

const OtGroup& ot_group_default() {
    static const OtGroup g{mpz_class(kP1536, 16), mpz_class(4), 256};
    return g;
}

const OtGroup& ot_group_test() {
    static const OtGroup g{mpz_class(kP512, 16), mpz_class(4), 256};
    return g;
}

OtSender::OtSender(const OtGroup& group, std::vector<LabelPair> messages, Rng& rng)
    : grp_(group), msgs_(std::move(messages)), rng_(rng) {}

Bytes OtSender::round1() {
    size_t n = msgs_.size();
    mpz_class d = rng_.mpz_bits(grp_.exp_bits);
    c_ = powm(grp_.g, d, grp_.p);
    r_.resize(n);
    x_.resize(n);
    Bytes out;
    put_u32(out, uint32_t(n));
    put_elem(out, c_, grp_.element_bytes());
    for (size_t i = 0; i < n; i++) {
        r_[i] = rng_.mpz_bits(grp_.exp_bits);
        x_[i] = powm(grp_.g, r_[i], grp_.p);
        put_elem(out, x_[i], grp_.element_bytes());
    }
    round1_done_ = true;
    return out;
}

Bytes OtSender::round3(const Bytes& receiver_msg) {
    if (!round1_done_) throw transfer_error("round1 must precede round3");
    size_t n = msgs_.size();
    ByteReader rd(receiver_msg);
    if (rd.u32() != n) throw transfer_error("batch size mismatch");
    Bytes out;
    put_u32(out, uint32_t(n));
    for (size_t i = 0; i < n; i++) {
        mpz_class pk0 = read_elem(rd, grp_.element_bytes());
        if (pk0 <= 1 || pk0 >= grp_.p) throw transfer_error("receiver key outside group");
        mpz_class k0 = powm(pk0, r_[i], grp_.p);
        // k1 = (c / pk0)^r = c^r * k0^{-1}
        mpz_class zi = powm(c_, r_[i], grp_.p);
        mpz_class k0_inv;
        if (!mpz_invert(k0_inv.get_mpz_t(), k0.get_mpz_t(), grp_.p.get_mpz_t()))
            throw transfer_error("non-invertible receiver key");
        mpz_class k1 = (zi * k0_inv) % grp_.p;
        WireLabel pad0 = key_from_element(k0, grp_.element_bytes(), uint32_t(i), 0);
        WireLabel pad1 = key_from_element(k1, grp_.element_bytes(), uint32_t(i), 1);
        WireLabel y0 = msgs_[i].l0 ^ pad0;
        WireLabel y1 = msgs_[i].l1 ^ pad1;
        out.insert(out.end(), y0.k.begin(), y0.k.end());
        out.insert(out.end(), y1.k.begin(), y1.k.end());
    }
    rd.expect_done();
    return out;
}

OtReceiver::OtReceiver(const OtGroup& group, std::vector<uint8_t> choices, Rng& rng)
    : grp_(group), choices_(std::move(choices)), rng_(rng) {}

Bytes OtReceiver::round2(const Bytes& sender_msg1) {
    size_t n = choices_.size();
    ByteReader rd(sender_msg1);
    if (rd.u32() != n) throw transfer_error("batch size mismatch");
    mpz_class c = read_elem(rd, grp_.element_bytes());
    sk_.resize(n);
    x_.resize(n);
    Bytes out;
    put_u32(out, uint32_t(n));
    for (size_t i = 0; i < n; i++) {
        x_[i] = read_elem(rd, grp_.element_bytes());
        sk_[i] = rng_.mpz_bits(grp_.exp_bits);
        mpz_class gsk = powm(grp_.g, sk_[i], grp_.p);
        mpz_class pk0 = gsk;
        if (choices_[i] & 1) {
            mpz_class gsk_inv;
            mpz_invert(gsk_inv.get_mpz_t(), gsk.get_mpz_t(), grp_.p.get_mpz_t());
            pk0 = (c * gsk_inv) % grp_.p;
        }
        put_elem(out, pk0, grp_.element_bytes());
    }
    rd.expect_done();
    round2_done_ = true;
    return out;
}

std::vector<WireLabel> OtReceiver::finish(const Bytes& sender_msg3) {
    if (!round2_done_) throw transfer_error("round2 must precede finish");
    size_t n = choices_.size();
    ByteReader rd(sender_msg3);
    if (rd.u32() != n) throw transfer_error("batch size mismatch");
    std::vector<WireLabel> out(n);
    for (size_t i = 0; i < n; i++) {
        WireLabel y0, y1;
        auto s0 = rd.raw(kLabelBytes);
        std::copy(s0.begin(), s0.end(), y0.k.begin());
        auto s1 = rd.raw(kLabelBytes);
        std::copy(s1.begin(), s1.end(), y1.k.begin());
        mpz_class k = powm(x_[i], sk_[i], grp_.p);
        uint8_t b = choices_[i] & 1;
        WireLabel pad = key_from_element(k, grp_.element_bytes(), uint32_t(i), b);
        out[i] = (b ? y1 : y0) ^ pad;
    }
    rd.expect_done();
    return out;
}

std::vector<WireLabel> run_ot_local(const OtGroup& group,
                                    const std::vector<LabelPair>& messages,
                                    const std::vector<uint8_t>& choices, Rng& sender_rng,
                                    Rng& receiver_rng) {
    if (messages.size() != choices.size()) throw transfer_error("batch size mismatch");
    OtSender snd(group, messages, sender_rng);
    OtReceiver rcv(group, choices, receiver_rng);
    Bytes m1 = snd.round1();
    Bytes m2 = rcv.round2(m1);
    Bytes m3 = snd.round3(m2);
    return rcv.finish(m3);
}

}  // namespace sdsa::gc
