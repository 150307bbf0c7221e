#pragma once

#include <gmpxx.h>

#include <vector>

#include "sdsa/circuits/garble.hpp"
#include "sdsa/rng.hpp"

namespace sdsa::gc {

struct transfer_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Discrete-log group for the base OT: safe prime p, generator g of the
// prime-order q = (p-1)/2 subgroup of quadratic residues.
struct OtGroup {
    mpz_class p;
    mpz_class g;
    unsigned exp_bits;  // short exponents, fine in the semi-honest model
    size_t element_bytes() const { return (mpz_sizeinbase(p.get_mpz_t(), 2) + 7) / 8; }
};

const OtGroup& ot_group_default();  // 1536-bit
const OtGroup& ot_group_test();     // 512-bit, fast mode for tests

// Batched semi-honest 1-out-of-2 OT of wire labels (Naor-Pinkas style).
// Three messages: sender -> receiver -> sender -> receiver. The sender's
// first message is fixed before anything choice-dependent arrives.
class OtSender {
public:
    OtSender(const OtGroup& group, std::vector<LabelPair> messages, Rng& rng);
    Bytes round1();
    Bytes round3(const Bytes& receiver_msg);

private:
    const OtGroup& grp_;
    std::vector<LabelPair> msgs_;
    Rng& rng_;
    mpz_class c_;                // g^d, shared across the batch
    std::vector<mpz_class> r_;   // per-transfer exponents
    std::vector<mpz_class> x_;   // g^r_i
    bool round1_done_ = false;
};

class OtReceiver {
public:
    OtReceiver(const OtGroup& group, std::vector<uint8_t> choices, Rng& rng);
    Bytes round2(const Bytes& sender_msg1);
    std::vector<WireLabel> finish(const Bytes& sender_msg3);

private:
    const OtGroup& grp_;
    std::vector<uint8_t> choices_;
    Rng& rng_;
    std::vector<mpz_class> sk_;
    std::vector<mpz_class> x_;
    bool round2_done_ = false;
};

// Drives a full batch locally (tests and in-process sessions).
std::vector<WireLabel> run_ot_local(const OtGroup& group,
                                    const std::vector<LabelPair>& messages,
                                    const std::vector<uint8_t>& choices, Rng& sender_rng,
                                    Rng& receiver_rng);

}  // namespace sdsa::gc
