#include "sdsa/paillier.hpp"

namespace sdsa::paillier {

namespace {

// L(x) = (x - 1) / n, defined on x = 1 mod n
mpz_class L(const mpz_class& x, const mpz_class& n) { return (x - 1) / n; }

KeyPair assemble(const mpz_class& p, const mpz_class& q) {
    mpz_class n = p * q;
    mpz_class pm1 = p - 1, qm1 = q - 1;
    mpz_class gcd;
    mpz_gcd(gcd.get_mpz_t(), mpz_class(n).get_mpz_t(), mpz_class(pm1 * qm1).get_mpz_t());
    if (gcd != 1) throw key_error("gcd(pq,(p-1)(q-1)) != 1");

    KeyPair kp;
    kp.pk.n = n;
    kp.pk.g = n + 1;
    kp.pk.n_squared = n * n;

    mpz_class lambda;
    mpz_lcm(lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
    mpz_class gl;
    mpz_powm(gl.get_mpz_t(), kp.pk.g.get_mpz_t(), lambda.get_mpz_t(), kp.pk.n_squared.get_mpz_t());
    mpz_class mu;
    if (!mpz_invert(mu.get_mpz_t(), L(gl, n).get_mpz_t(), n.get_mpz_t()))
        throw key_error("mu does not exist for chosen g");

    kp.sk.lambda = lambda;
    kp.sk.mu = mu;
    kp.sk.n = n;
    kp.sk.p_squared = p * p;
    kp.sk.q_squared = q * q;
    if (!mpz_invert(kp.sk.q_squared_inv.get_mpz_t(), kp.sk.q_squared.get_mpz_t(),
                    kp.sk.p_squared.get_mpz_t()))
        throw key_error("p, q not coprime");
    return kp;
}

}  // namespace

KeyPair keygen(unsigned key_bits, Rng& rng) {
    if (key_bits < 16 || key_bits % 2 != 0)
        throw key_error("key_bits must be even and >= 16");
    for (;;) {
        mpz_class p = rng.prime(key_bits / 2);
        mpz_class q = rng.prime(key_bits / 2);
        if (p == q) continue;
        if (mpz_sizeinbase(mpz_class(p * q).get_mpz_t(), 2) != key_bits) continue;
        try {
            return assemble(p, q);
        } catch (const key_error&) {
            // bad prime draw; retry
        }
    }
}

KeyPair keygen_from_primes(const mpz_class& p, const mpz_class& q) { return assemble(p, q); }

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, Rng& rng) {
    if (m < 0 || m >= pk.n) throw domain_error("plaintext outside Z_n");
    mpz_class r, gcd;
    do {
        r = rng.mpz_below(pk.n);
        mpz_gcd(gcd.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
    } while (r == 0 || gcd != 1);

    // g = n+1, so g^m = 1 + m*n mod n^2
    mpz_class gm = (1 + m * pk.n) % pk.n_squared;
    mpz_class rn;
    mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t(), pk.n_squared.get_mpz_t());
    return Ciphertext{(gm * rn) % pk.n_squared};
}

mpz_class decrypt(const SecretKey& sk, const Ciphertext& ct) {
    mpz_class n2 = sk.n * sk.n;
    if (ct.c <= 0 || ct.c >= n2) throw ciphertext_error("ciphertext outside Z_{n^2}");
    mpz_class gcd;
    mpz_gcd(gcd.get_mpz_t(), ct.c.get_mpz_t(), n2.get_mpz_t());
    if (gcd != 1) throw ciphertext_error("ciphertext not a unit mod n^2");

    // c^lambda mod n^2 via CRT over p^2, q^2
    mpz_class ap, aq;
    mpz_powm(ap.get_mpz_t(), ct.c.get_mpz_t(), sk.lambda.get_mpz_t(), sk.p_squared.get_mpz_t());
    mpz_powm(aq.get_mpz_t(), ct.c.get_mpz_t(), sk.lambda.get_mpz_t(), sk.q_squared.get_mpz_t());
    mpz_class t = ((ap - aq) * sk.q_squared_inv) % sk.p_squared;
    if (t < 0) t += sk.p_squared;
    mpz_class cl = aq + t * sk.q_squared;

    return (L(cl, sk.n) * sk.mu) % sk.n;
}

Ciphertext homomorphic_add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
    return Ciphertext{(a.c * b.c) % pk.n_squared};
}

Ciphertext scalar_mul(const PublicKey& pk, const Ciphertext& c, const mpz_class& k) {
    if (k < 0) throw domain_error("scalar must be nonnegative");
    mpz_class out;
    mpz_powm(out.get_mpz_t(), c.c.get_mpz_t(), k.get_mpz_t(), pk.n_squared.get_mpz_t());
    return Ciphertext{out};
}

Ciphertext self_blind(const PublicKey& pk, const Ciphertext& c, Rng& rng) {
    return homomorphic_add(pk, c, encrypt(pk, 0, rng));
}

Bytes PublicKey::serialize() const {
    Bytes out;
    put_mpz(out, n);
    put_mpz(out, g);
    return out;
}

PublicKey PublicKey::deserialize(ByteReader& r) {
    PublicKey pk;
    pk.n = read_mpz(r);
    pk.g = read_mpz(r);
    pk.n_squared = pk.n * pk.n;
    return pk;
}

Bytes SecretKey::serialize() const {
    Bytes out;
    put_mpz(out, lambda);
    put_mpz(out, mu);
    put_mpz(out, n);
    put_mpz(out, p_squared);
    put_mpz(out, q_squared);
    put_mpz(out, q_squared_inv);
    return out;
}

SecretKey SecretKey::deserialize(ByteReader& r) {
    SecretKey sk;
    sk.lambda = read_mpz(r);
    sk.mu = read_mpz(r);
    sk.n = read_mpz(r);
    sk.p_squared = read_mpz(r);
    sk.q_squared = read_mpz(r);
    sk.q_squared_inv = read_mpz(r);
    return sk;
}

Bytes Ciphertext::serialize() const {
    Bytes out;
    put_mpz(out, c);
    return out;
}

Ciphertext Ciphertext::deserialize(ByteReader& r) { return Ciphertext{read_mpz(r)}; }

}  // namespace sdsa::paillier
