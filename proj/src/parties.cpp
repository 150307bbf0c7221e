#include "sdsa/protocol/parties.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <thread>

#include "sdsa/circuits/garble.hpp"
#include "sdsa/synth.hpp"

namespace sdsa::proto {

namespace {

[[noreturn]] void abort_session(MeteredChannel& ch, const std::string& why) {
    Bytes payload(why.begin(), why.end());
    try {
        ch.send(MsgType::Abort, std::move(payload));
    } catch (const transport_error&) {
        // peer already gone; surface the original failure
    }
    throw protocol_error(why);
}

Message expect(MeteredChannel& ch, MsgType want) {
    Message m = ch.recv();
    if (m.type == MsgType::Abort)
        throw protocol_error("peer aborted: " +
                             std::string(m.payload.begin(), m.payload.end()));
    if (m.type != want)
        abort_session(ch, std::string("unexpected message ") + msg_type_name(m.type) +
                              ", wanted " + msg_type_name(want));
    return m;
}

void put_joint(Bytes& out, const jointenc::JointCiphertext& jc) {
    Bytes b = jc.serialize();
    out.insert(out.end(), b.begin(), b.end());
}

}  // namespace

Bytes make_seller_submission(uint32_t slot, uint64_t id, uint64_t request,
                             const paillier::PublicKey& agent_pk,
                             const jointenc::PlaintextLayout& layout, Rng& rng) {
    if (id == 0 || id >= (uint64_t(1) << layout.value_bits) ||
        request >= (uint64_t(1) << layout.value_bits))
        throw protocol_error("seller id/request outside the value field");
    Bytes out;
    put_u32(out, slot);
    put_mpz(out, paillier::encrypt(agent_pk, mpz_class(static_cast<unsigned long>(id)), rng).c);
    put_mpz(out,
            paillier::encrypt(agent_pk, mpz_class(static_cast<unsigned long>(request)), rng).c);
    return out;
}

Bytes make_buyer_submission(uint32_t slot, uint64_t id, uint64_t bid, int64_t x, int64_t y,
                            const paillier::PublicKey& agent_pk,
                            const jointenc::PlaintextLayout& layout, Rng& rng) {
    if (id == 0 || id >= (uint64_t(1) << layout.value_bits) ||
        bid >= (uint64_t(1) << layout.value_bits))
        throw protocol_error("buyer id/bid outside the value field");
    Bytes out;
    put_u32(out, slot);
    put_u64(out, uint64_t(x));
    put_u64(out, uint64_t(y));
    put_mpz(out, paillier::encrypt(agent_pk, mpz_class(static_cast<unsigned long>(id)), rng).c);
    put_mpz(out, paillier::encrypt(agent_pk, mpz_class(static_cast<unsigned long>(bid)), rng).c);
    return out;
}

// ------------------------------------------------------------- Auctioneer

Auctioneer::Auctioneer(SessionConfig cfg, paillier::KeyPair own_keys,
                       paillier::PublicKey agent_pk, uint64_t interference_range,
                       uint64_t rng_seed)
    : cfg_(cfg),
      keys_(std::move(own_keys)),
      agent_pk_(std::move(agent_pk)),
      range_(interference_range),
      rng_(rng_seed) {
    jointenc::validate_layout(cfg_.layout, keys_.pk, agent_pk_);
}

void Auctioneer::check_ciphertext(const paillier::Ciphertext& c) const {
    if (c.c <= 0 || c.c >= agent_pk_.n_squared)
        throw protocol_error("malformed submission ciphertext");
    mpz_class gcd;
    mpz_gcd(gcd.get_mpz_t(), c.c.get_mpz_t(), agent_pk_.n_squared.get_mpz_t());
    if (gcd != 1) throw protocol_error("malformed submission ciphertext");
}

void Auctioneer::collect_seller(const Bytes& submission) {
    if (phase_ != Phase::Submission) throw protocol_error("submissions are closed");
    ByteReader r(submission);
    SellerSub s;
    s.slot = r.u32();
    s.id = paillier::Ciphertext{read_mpz(r)};
    s.request = paillier::Ciphertext{read_mpz(r)};
    r.expect_done();
    check_ciphertext(s.id);
    check_ciphertext(s.request);
    for (const SellerSub& other : seller_subs_)
        if (other.slot == s.slot) throw protocol_error("duplicate seller submission");
    submission_bytes_ += kFrameOverhead + submission.size();
    seller_subs_.push_back(std::move(s));
}

void Auctioneer::collect_buyer(const Bytes& submission) {
    if (phase_ != Phase::Submission) throw protocol_error("submissions are closed");
    ByteReader r(submission);
    BuyerSub b;
    b.slot = r.u32();
    b.x = int64_t(r.u64());
    b.y = int64_t(r.u64());
    b.id = paillier::Ciphertext{read_mpz(r)};
    b.bid = paillier::Ciphertext{read_mpz(r)};
    r.expect_done();
    check_ciphertext(b.id);
    check_ciphertext(b.bid);
    for (const BuyerSub& other : buyer_subs_)
        if (other.slot == b.slot) throw protocol_error("duplicate buyer submission");
    submission_bytes_ += kFrameOverhead + submission.size();
    buyer_subs_.push_back(std::move(b));
}

void Auctioneer::collect(const Message& m) {
    switch (m.type) {
        case MsgType::SubmitSeller: collect_seller(m.payload); break;
        case MsgType::SubmitBuyer: collect_buyer(m.payload); break;
        default:
            throw protocol_error(std::string("unexpected message in submission phase: ") +
                                 msg_type_name(m.type));
    }
}

void Auctioneer::phase2_group(MeteredChannel& ch) {
    if (phase_ != Phase::Submission) throw protocol_error("phase order violation");
    if (seller_subs_.empty() || buyer_subs_.empty())
        throw protocol_error("need at least one seller and one buyer");
    const size_t n = buyer_subs_.size();

    // conflict graph over submission order
    tdsa::AuctionInstance geo;
    geo.interference_range = range_;
    geo.sellers.push_back({1, 0});  // placeholder; only buyer geometry matters here
    for (const BuyerSub& b : buyer_subs_) geo.buyers.push_back({1, 0, b.x, b.y});
    tdsa::ConflictGraph graph = tdsa::build_conflict_graph(geo);

    // fresh anonymizing permutation
    perm_.resize(n);
    std::iota(perm_.begin(), perm_.end(), 0);
    for (size_t i = n; i > 1; i--) std::swap(perm_[i - 1], perm_[rng_.below(i)]);

    Bytes payload;
    put_u32(payload, uint32_t(n));
    Bytes adj((n * n + 7) / 8, 0);
    for (size_t i = 0; i < n; i++)
        for (size_t j = 0; j < n; j++)
            if (graph.edge(i, j)) {
                size_t bit = perm_[i] * n + perm_[j];
                adj[bit / 8] |= uint8_t(1u << (bit % 8));
            }
    payload.insert(payload.end(), adj.begin(), adj.end());

    std::vector<uint32_t> inv(n);
    for (size_t i = 0; i < n; i++) inv[perm_[i]] = uint32_t(i);
    for (size_t p = 0; p < n; p++) {
        const BuyerSub& b = buyer_subs_[inv[p]];
        put_joint(payload, jointenc::joint_encrypt_external(b.id, keys_.pk, agent_pk_,
                                                            cfg_.layout, rng_));
        put_joint(payload, jointenc::joint_encrypt_external(b.bid, keys_.pk, agent_pk_,
                                                            cfg_.layout, rng_));
    }

    put_u32(payload, uint32_t(seller_subs_.size()));
    seller_joint_.clear();
    for (const SellerSub& s : seller_subs_) {
        auto jid = jointenc::joint_encrypt_external(s.id, keys_.pk, agent_pk_, cfg_.layout, rng_);
        auto jq = jointenc::joint_encrypt_external(s.request, keys_.pk, agent_pk_, cfg_.layout,
                                                   rng_);
        put_mpz(payload, jid.part2.c);
        put_mpz(payload, jq.part2.c);
        seller_joint_.push_back({std::move(jid), std::move(jq)});
    }
    ch.send(MsgType::GraphAndTuples, std::move(payload));

    Message m = expect(ch, MsgType::GroupsReturn);
    ByteReader r(m.payload);
    groups_ = r.u32();
    group_slots_ = r.u32();
    if (groups_ == 0 || group_slots_ == 0 || uint64_t(groups_) * group_slots_ < n)
        abort_session(ch, "returned group set cannot cover the buyers");
    gstar_.clear();
    for (size_t i = 0; i < size_t(groups_) * group_slots_; i++) {
        auto jid = jointenc::JointCiphertext::deserialize(r);
        auto jb = jointenc::JointCiphertext::deserialize(r);
        if (!(jid.layout == cfg_.layout) || !(jb.layout == cfg_.layout))
            abort_session(ch, "layout mismatch in returned groups");
        gstar_.push_back({std::move(jid), std::move(jb)});
    }
    r.expect_done();
    phase_ = Phase::Grouped;
}

oblivious::ObliviousLayout Auctioneer::auction_layout() const {
    return oblivious::ObliviousLayout{uint32_t(seller_subs_.size()), groups_, group_slots_,
                                      cfg_.layout.value_bits};
}

tdsa::AuctionOutcome Auctioneer::phase3_compute(MeteredChannel& ch) {
    if (phase_ != Phase::Grouped) throw protocol_error("phase order violation");
    oblivious::ObliviousLayout layout = auction_layout();

    // this party's additive shares, canonical order
    std::vector<uint64_t> shares;
    for (const auto& sj : seller_joint_) {
        shares.push_back(jointenc::decrypt_share(sj[0], keys_.sk, 1).value);
        shares.push_back(jointenc::decrypt_share(sj[1], keys_.sk, 1).value);
    }
    for (const auto& gj : gstar_) {
        shares.push_back(jointenc::decrypt_share(gj[0], keys_.sk, 1).value);
        shares.push_back(jointenc::decrypt_share(gj[1], keys_.sk, 1).value);
    }
    std::vector<uint8_t> choice_bits = oblivious::share_bits(layout, shares);

    Message blob = expect(ch, MsgType::GcBlob);
    ByteReader r(blob.payload);
    if (r.u32() != layout.sellers || r.u32() != layout.groups || r.u32() != layout.group_slots ||
        r.u32() != layout.value_bits)
        abort_session(ch, "layout mismatch in garbled circuit");
    gc::GarbledCircuit garbled = gc::GarbledCircuit::deserialize(r);
    uint32_t ngen = r.u32();
    std::vector<gc::WireLabel> gen_labels(ngen);
    for (auto& l : gen_labels) {
        auto s = r.raw(gc::kLabelBytes);
        std::copy(s.begin(), s.end(), l.k.begin());
    }
    r.expect_done();

    gc::BooleanCircuit circuit = oblivious::synthesize_circuit(layout, cfg_.gate_budget);
    synthesized_gates_ = circuit.gates.size();
    if (gen_labels.size() != circuit.generator_inputs)
        abort_session(ch, "generator label count mismatch");
    if (choice_bits.size() != circuit.evaluator_inputs)
        abort_session(ch, "evaluator input width mismatch");

    // labels for our own share bits arrive via oblivious transfer
    gc::OtReceiver ot(cfg_.ot_group(), choice_bits, rng_);
    Message ot1 = expect(ch, MsgType::OtMsg);
    ch.send(MsgType::OtMsg, ot.round2(ot1.payload));
    Message ot3 = expect(ch, MsgType::OtMsg);
    std::vector<gc::WireLabel> eval_labels = ot.finish(ot3.payload);

    tdsa::AuctionOutcome outcome;
    try {
        auto out_labels = gc::evaluate(circuit, garbled, gen_labels, eval_labels);
        auto bits = gc::decode(garbled, out_labels);
        outcome = oblivious::assemble_outcome(layout, oblivious::words_from_bits(layout, bits));
    } catch (const std::runtime_error& e) {
        abort_session(ch, std::string("evaluation failed: ") + e.what());
    }

    ch.send(MsgType::Outcome, outcome.serialize());
    outcome_ = outcome;
    phase_ = Phase::Computed;
    return outcome;
}

std::vector<Notification> Auctioneer::publish_outcome() const {
    if (!outcome_) throw protocol_error("no outcome to publish");
    Bytes bytes = outcome_->serialize();
    std::vector<Notification> out;
    for (const SellerSub& s : seller_subs_) out.push_back({s.slot, true, bytes});
    for (const BuyerSub& b : buyer_subs_) out.push_back({b.slot, false, bytes});
    return out;
}

// ------------------------------------------------------------------ Agent

Agent::Agent(SessionConfig cfg, paillier::KeyPair own_keys, paillier::PublicKey auctioneer_pk,
             uint64_t rng_seed)
    : cfg_(cfg),
      keys_(std::move(own_keys)),
      auctioneer_pk_(std::move(auctioneer_pk)),
      rng_(rng_seed) {
    jointenc::validate_layout(cfg_.layout, auctioneer_pk_, keys_.pk);
}

void Agent::phase2_serve(MeteredChannel& ch) {
    if (phase_ != Phase::Idle) throw protocol_error("phase order violation");
    Message m = expect(ch, MsgType::GraphAndTuples);
    ByteReader r(m.payload);
    uint32_t n = r.u32();
    if (n == 0) abort_session(ch, "no buyers");
    auto adj = r.raw((size_t(n) * n + 7) / 8);
    tdsa::ConflictGraph graph(n);
    for (size_t i = 0; i < n; i++)
        for (size_t j = i + 1; j < n; j++) {
            size_t bit = i * n + j;
            if (adj[bit / 8] & (1u << (bit % 8))) graph.add_edge(i, j);
        }

    std::vector<std::array<jointenc::JointCiphertext, 2>> buyer_tuples;
    for (uint32_t i = 0; i < n; i++) {
        auto jid = jointenc::JointCiphertext::deserialize(r);
        auto jb = jointenc::JointCiphertext::deserialize(r);
        if (!(jid.layout == cfg_.layout) || !(jb.layout == cfg_.layout))
            abort_session(ch, "layout mismatch in buyer tuples");
        buyer_tuples.push_back({std::move(jid), std::move(jb)});
    }
    sellers_ = r.u32();
    seller_parts_.clear();
    for (uint32_t i = 0; i < sellers_; i++) {
        paillier::Ciphertext id{read_mpz(r)};
        paillier::Ciphertext q{read_mpz(r)};
        seller_parts_.push_back({std::move(id), std::move(q)});
    }
    r.expect_done();

    grouping_ = tdsa::form_groups(graph);
    // self-check: every group must be an independent set
    for (const auto& grp : grouping_.groups)
        for (size_t a = 0; a < grp.size(); a++)
            for (size_t b = a + 1; b < grp.size(); b++)
                if (graph.edge(grp[a], grp[b]))
                    abort_session(ch, "grouping produced a conflicting group");

    groups_ = uint32_t(grouping_.groups.size());
    group_slots_ = uint32_t(grouping_.max_group_size());

    Bytes payload;
    put_u32(payload, groups_);
    put_u32(payload, group_slots_);
    gstar_.clear();
    for (const auto& grp : grouping_.groups) {
        for (uint32_t anon : grp) {
            const auto& t = buyer_tuples[anon];
            gstar_.push_back({jointenc::ss_blind(t[0], auctioneer_pk_, keys_.pk, rng_),
                              jointenc::ss_blind(t[1], auctioneer_pk_, keys_.pk, rng_)});
        }
        for (size_t pad = grp.size(); pad < group_slots_; pad++)
            gstar_.push_back(
                {jointenc::joint_encrypt_known(0, auctioneer_pk_, keys_.pk, cfg_.layout, rng_),
                 jointenc::joint_encrypt_known(0, auctioneer_pk_, keys_.pk, cfg_.layout, rng_)});
    }
    for (const auto& tuple : gstar_) {
        put_joint(payload, tuple[0]);
        put_joint(payload, tuple[1]);
    }
    ch.send(MsgType::GroupsReturn, std::move(payload));
    phase_ = Phase::Grouped;
}

void Agent::phase3_serve(MeteredChannel& ch) {
    if (phase_ != Phase::Grouped) throw protocol_error("phase order violation");
    oblivious::ObliviousLayout layout{sellers_, groups_, group_slots_, cfg_.layout.value_bits};

    std::vector<uint64_t> shares;
    for (const auto& sp : seller_parts_) {
        shares.push_back(jointenc::share_from_part(keys_.sk, sp[0], cfg_.layout));
        shares.push_back(jointenc::share_from_part(keys_.sk, sp[1], cfg_.layout));
    }
    for (const auto& gj : gstar_) {
        shares.push_back(jointenc::decrypt_share(gj[0], keys_.sk, 2).value);
        shares.push_back(jointenc::decrypt_share(gj[1], keys_.sk, 2).value);
    }
    std::vector<uint8_t> gen_bits = oblivious::share_bits(layout, shares);

    gc::BooleanCircuit circuit = oblivious::synthesize_circuit(layout, cfg_.gate_budget);
    gc::GarbleResult garbled = gc::garble(circuit, rng_);
    std::vector<gc::WireLabel> gen_labels =
        gc::garble_inputs(garbled.generator_inputs, gen_bits);

    Bytes payload;
    put_u32(payload, layout.sellers);
    put_u32(payload, layout.groups);
    put_u32(payload, layout.group_slots);
    put_u32(payload, layout.value_bits);
    Bytes gcb = garbled.gc.serialize();
    payload.insert(payload.end(), gcb.begin(), gcb.end());
    put_u32(payload, uint32_t(gen_labels.size()));
    for (const auto& l : gen_labels) payload.insert(payload.end(), l.k.begin(), l.k.end());
    ch.send(MsgType::GcBlob, std::move(payload));

    gc::OtSender ot(cfg_.ot_group(), garbled.evaluator_inputs, rng_);
    ch.send(MsgType::OtMsg, ot.round1());
    Message ot2 = expect(ch, MsgType::OtMsg);
    ch.send(MsgType::OtMsg, ot.round3(ot2.payload));

    Message m = expect(ch, MsgType::Outcome);
    outcome_ = tdsa::AuctionOutcome::deserialize(m.payload);
    phase_ = Phase::Computed;
}

const tdsa::AuctionOutcome& Agent::outcome() const {
    if (!outcome_) throw protocol_error("no outcome received yet");
    return *outcome_;
}

tdsa::GroupSet translate_grouping(const tdsa::GroupSet& anon_groups,
                                  const std::vector<uint32_t>& buyer_permutation) {
    std::vector<uint32_t> inv(buyer_permutation.size());
    for (size_t i = 0; i < buyer_permutation.size(); i++) inv[buyer_permutation[i]] = uint32_t(i);
    tdsa::GroupSet out;
    for (const auto& grp : anon_groups.groups) {
        std::vector<uint32_t> members;
        for (uint32_t anon : grp) members.push_back(inv.at(anon));
        out.groups.push_back(std::move(members));
    }
    return out;
}

SessionResult run_session(const tdsa::AuctionInstance& instance, const SessionConfig& cfg,
                          Transport transport, uint64_t seed) {
    instance.validate(cfg.layout.value_bits);
    using clock = std::chrono::steady_clock;
    auto ms = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };

    Rng key_rng(seed);
    paillier::KeyPair auctioneer_keys = paillier::keygen(cfg.paillier_bits, key_rng);
    paillier::KeyPair agent_keys = paillier::keygen(cfg.paillier_bits, key_rng);

    Auctioneer auctioneer(cfg, auctioneer_keys, agent_keys.pk, instance.interference_range,
                          key_rng.u64());
    Agent agent(cfg, agent_keys, auctioneer_keys.pk, key_rng.u64());

    // Phase I: participants encrypt and submit
    auto t0 = clock::now();
    Rng client_rng(key_rng.u64());
    uint32_t slot = 0;
    for (const tdsa::Seller& s : instance.sellers)
        auctioneer.collect({MsgType::SubmitSeller,
                            make_seller_submission(slot++, s.id, s.request, agent_keys.pk,
                                                   cfg.layout, client_rng)});
    slot = 0;
    for (const tdsa::Buyer& b : instance.buyers)
        auctioneer.collect({MsgType::SubmitBuyer,
                            make_buyer_submission(slot++, b.id, b.bid, b.x, b.y, agent_keys.pk,
                                                  cfg.layout, client_rng)});
    auto t1 = clock::now();

    std::unique_ptr<Channel> a_raw, b_raw;
    std::optional<TcpListener> listener;
    if (transport == Transport::InProc) {
        auto pair = make_inproc_pair();
        a_raw = std::move(pair.first);
        b_raw = std::move(pair.second);
    } else {
        listener.emplace(0);
        SessionKey key{};
        uint16_t port = listener->port();
        std::unique_ptr<Channel> client;
        std::thread connector([&] { client = tcp_connect("127.0.0.1", port, key); });
        a_raw = listener->accept(key);
        connector.join();
        b_raw = std::move(client);
    }
    MeteredChannel a_ch(std::move(a_raw)), b_ch(std::move(b_raw));

    std::exception_ptr agent_error;
    std::thread agent_thread([&] {
        try {
            b_ch.set_phase(2);
            agent.phase2_serve(b_ch);
            b_ch.set_phase(3);
            agent.phase3_serve(b_ch);
        } catch (...) {
            agent_error = std::current_exception();
            try {
                b_ch.send(MsgType::Abort, {});  // unblock a peer waiting on recv
            } catch (...) {
            }
        }
    });

    SessionResult res;
    try {
        a_ch.set_phase(2);
        auctioneer.phase2_group(a_ch);
        auto t2 = clock::now();
        a_ch.set_phase(3);
        res.outcome = auctioneer.phase3_compute(a_ch);
        auto t3 = clock::now();
        res.phase1_ms = ms(t0, t1);
        res.phase2_ms = ms(t1, t2);
        res.phase3_ms = ms(t2, t3);
    } catch (...) {
        try {
            a_ch.send(MsgType::Abort, {});
        } catch (...) {
        }
        agent_thread.join();
        throw;
    }
    agent_thread.join();
    if (agent_error) std::rethrow_exception(agent_error);

    res.pinned_groups = translate_grouping(agent.grouping(), auctioneer.buyer_permutation());
    res.submission_bytes = auctioneer.submission_bytes();
    res.phase2_bytes = a_ch.phase_bytes(2);
    res.phase3_bytes = a_ch.phase_bytes(3);
    res.gates = auctioneer.synthesized_gates();
    if (!(res.outcome == agent.outcome()))
        throw protocol_error("endpoints disagree on the outcome");
    return res;
}

}  // namespace sdsa::proto
