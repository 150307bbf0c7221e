#pragma once

#include <optional>

#include "sdsa/circuits/ot.hpp"
#include "sdsa/jointenc.hpp"
#include "sdsa/oblivious.hpp"
#include "sdsa/protocol/wire.hpp"
#include "sdsa/tdsa.hpp"

namespace sdsa::proto {

struct SessionConfig {
    jointenc::PlaintextLayout layout{32, 81};
    unsigned paillier_bits = 1024;
    bool fast_ot_group = false;  // 512-bit test group instead of the 1536-bit default
    size_t gate_budget = size_t(1) << 26;

    const gc::OtGroup& ot_group() const {
        return fast_ot_group ? gc::ot_group_test() : gc::ot_group_default();
    }
};

// Client-side submission builders; sensitive fields encrypted under the
// agent's key only. The slot number is transport bookkeeping, not the
// (encrypted) auction identity.
Bytes make_seller_submission(uint32_t slot, uint64_t id, uint64_t request,
                             const paillier::PublicKey& agent_pk,
                             const jointenc::PlaintextLayout& layout, Rng& rng);
Bytes make_buyer_submission(uint32_t slot, uint64_t id, uint64_t bid, int64_t x, int64_t y,
                            const paillier::PublicKey& agent_pk,
                            const jointenc::PlaintextLayout& layout, Rng& rng);

struct Notification {
    uint32_t slot;
    bool is_seller;
    Bytes outcome_bytes;
};

// Auctioneer endpoint: collects submissions, outsources grouping, evaluates
// the garbled auction. Holds sk_A only; never sees sk_B.
class Auctioneer {
public:
    Auctioneer(SessionConfig cfg, paillier::KeyPair own_keys, paillier::PublicKey agent_pk,
               uint64_t interference_range, uint64_t rng_seed);

    void collect_seller(const Bytes& submission);
    void collect_buyer(const Bytes& submission);
    // typed entry point for framed submissions
    void collect(const Message& m);
    uint64_t submission_bytes() const { return submission_bytes_; }

    void phase2_group(MeteredChannel& ch);
    tdsa::AuctionOutcome phase3_compute(MeteredChannel& ch);
    std::vector<Notification> publish_outcome() const;

    // trusted test/harness introspection
    const std::vector<uint32_t>& buyer_permutation() const { return perm_; }
    oblivious::ObliviousLayout auction_layout() const;
    size_t sellers() const { return seller_subs_.size(); }
    size_t buyers() const { return buyer_subs_.size(); }
    size_t synthesized_gates() const { return synthesized_gates_; }
    const std::vector<std::array<jointenc::JointCiphertext, 2>>& group_tuples() const {
        return gstar_;
    }
    const std::vector<std::array<jointenc::JointCiphertext, 2>>& seller_tuples() const {
        return seller_joint_;
    }

private:
    enum class Phase { Submission, Grouped, Computed };

    struct SellerSub {
        uint32_t slot;
        paillier::Ciphertext id, request;
    };
    struct BuyerSub {
        uint32_t slot;
        int64_t x, y;
        paillier::Ciphertext id, bid;
    };

    void check_ciphertext(const paillier::Ciphertext& c) const;

    SessionConfig cfg_;
    paillier::KeyPair keys_;
    paillier::PublicKey agent_pk_;
    uint64_t range_;
    Rng rng_;
    Phase phase_ = Phase::Submission;

    std::vector<SellerSub> seller_subs_;
    std::vector<BuyerSub> buyer_subs_;
    uint64_t submission_bytes_ = 0;

    std::vector<uint32_t> perm_;  // buyer submission index -> anonymous index
    std::vector<std::array<jointenc::JointCiphertext, 2>> seller_joint_;  // {ID, Q}
    std::vector<std::array<jointenc::JointCiphertext, 2>> gstar_;         // T*R x {ID, B}
    uint32_t groups_ = 0, group_slots_ = 0;
    size_t synthesized_gates_ = 0;
    std::optional<tdsa::AuctionOutcome> outcome_;
};

// Agent endpoint: groups anonymized buyers, garbles the auction circuit.
// Holds sk_B only; never sees sk_A.
class Agent {
public:
    Agent(SessionConfig cfg, paillier::KeyPair own_keys, paillier::PublicKey auctioneer_pk,
          uint64_t rng_seed);

    void phase2_serve(MeteredChannel& ch);
    void phase3_serve(MeteredChannel& ch);

    const tdsa::GroupSet& grouping() const { return grouping_; }  // anonymous indices
    const tdsa::AuctionOutcome& outcome() const;

private:
    enum class Phase { Idle, Grouped, Computed };

    SessionConfig cfg_;
    paillier::KeyPair keys_;
    paillier::PublicKey auctioneer_pk_;
    Rng rng_;
    Phase phase_ = Phase::Idle;

    std::vector<std::array<paillier::Ciphertext, 2>> seller_parts_;  // agent part of {ID, Q}
    std::vector<std::array<jointenc::JointCiphertext, 2>> gstar_;
    uint32_t sellers_ = 0, groups_ = 0, group_slots_ = 0;
    tdsa::GroupSet grouping_;
    std::optional<tdsa::AuctionOutcome> outcome_;
};

// Maps the agent's anonymous grouping back to buyer submission indices,
// preserving member order; the pinned plaintext run consumes this.
tdsa::GroupSet translate_grouping(const tdsa::GroupSet& anon_groups,
                                  const std::vector<uint32_t>& buyer_permutation);

enum class Transport { InProc, Tcp };

struct SessionResult {
    tdsa::AuctionOutcome outcome;
    tdsa::GroupSet pinned_groups;  // in submission order
    double phase1_ms = 0, phase2_ms = 0, phase3_ms = 0;
    uint64_t submission_bytes = 0;
    uint64_t phase2_bytes = 0, phase3_bytes = 0;
    size_t gates = 0;
};

// Runs submissions plus the two endpoints (agent on a second thread) and
// returns the auctioneer-side view of the session.
SessionResult run_session(const tdsa::AuctionInstance& instance, const SessionConfig& cfg,
                          Transport transport, uint64_t seed);

}  // namespace sdsa::proto
