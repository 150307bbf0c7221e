#include "sdsa/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace sdsa::bench {

void BenchConfig::validate() const {
    if (buyers == 0 || sellers == 0) throw bench_error("need buyers and sellers");
    if (request_max < 2 || bid_max < 2) throw bench_error("value ranges must allow [1, max)");
    if (reps < 1) throw bench_error("reps must be >= 1");
    uint64_t limit = uint64_t(1) << bits;
    if (request_max > limit || bid_max > limit || buyers >= limit || sellers >= limit)
        throw bench_error("values or ids do not fit the configured bit width");
}

proto::SessionConfig BenchConfig::session() const {
    proto::SessionConfig s;
    s.layout = jointenc::PlaintextLayout{bits, rand_bits};
    s.paillier_bits = paillier_bits;
    s.fast_ot_group = fast_ot_group;
    return s;
}

tdsa::AuctionInstance generate_instance(const BenchConfig& cfg, Rng& rng) {
    cfg.validate();
    tdsa::AuctionInstance inst;
    inst.interference_range = cfg.range;
    for (uint32_t i = 0; i < cfg.sellers; i++)
        inst.sellers.push_back({i + 1, 1 + rng.below(cfg.request_max - 1)});
    for (uint32_t i = 0; i < cfg.buyers; i++)
        inst.buyers.push_back({i + 1, 1 + rng.below(cfg.bid_max - 1),
                               int64_t(rng.below(cfg.area + 1)), int64_t(rng.below(cfg.area + 1))});
    return inst;
}

namespace {

struct PlainTimings {
    double group_ms = 0, auction_ms = 0;
    tdsa::AuctionOutcome outcome;
    tdsa::GroupSet groups;
};

// Grouping cost is always measured on the instance's own graph; when a
// pinned grouping is supplied (secure comparison runs) the priced outcome
// uses it, so both modes describe the same auction.
PlainTimings run_plain(const tdsa::AuctionInstance& inst, const tdsa::GroupSet* pinned) {
    using clock = std::chrono::steady_clock;
    PlainTimings r;
    auto t0 = clock::now();
    tdsa::ConflictGraph graph = tdsa::build_conflict_graph(inst);
    r.groups = tdsa::form_groups(graph);
    auto t1 = clock::now();
    r.outcome = tdsa::run_tdsa_pinned(inst, pinned ? *pinned : r.groups);
    auto t2 = clock::now();
    r.group_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    r.auction_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
    return r;
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchConfig& cfg) {
    cfg.validate();
    std::vector<BenchRecord> rows;
    auto emit = [&](const char* mode, const char* phase, double ms, uint64_t bytes,
                    uint64_t gates, const std::string& digest) {
        rows.push_back({cfg.buyers, cfg.sellers, cfg.bits, mode, phase, ms, bytes, gates,
                        digest});
    };

    for (uint32_t rep = 0; rep < cfg.reps; rep++) {
        Rng rng(cfg.seed + rep);
        tdsa::AuctionInstance inst = generate_instance(cfg, rng);

        std::optional<proto::SessionResult> secure;
        if (cfg.mode == BenchConfig::Mode::Secure || cfg.mode == BenchConfig::Mode::Both) {
            secure = proto::run_session(inst, cfg.session(), cfg.transport, cfg.seed + rep);
            tdsa::AuctionOutcome pinned = tdsa::run_tdsa_pinned(inst, secure->pinned_groups);
            if (!(pinned == secure->outcome))
                throw bench_error("secure outcome diverges from the plaintext auction: secure " +
                                  secure->outcome.digest() + " vs plain " + pinned.digest());
        }
        if (cfg.mode == BenchConfig::Mode::Plain || cfg.mode == BenchConfig::Mode::Both) {
            PlainTimings p = run_plain(inst, secure ? &secure->pinned_groups : nullptr);
            std::string digest = p.outcome.digest();
            emit("plain", "group", p.group_ms, 0, 0, digest);
            emit("plain", "auction", p.auction_ms, 0, 0, digest);
            emit("plain", "total", p.group_ms + p.auction_ms, 0, 0, digest);
        }
        if (secure) {
            const proto::SessionResult& s = *secure;
            std::string digest = s.outcome.digest();
            emit("secure", "phase1", s.phase1_ms, s.submission_bytes, 0, digest);
            emit("secure", "phase2", s.phase2_ms, s.phase2_bytes, 0, digest);
            emit("secure", "phase3", s.phase3_ms, s.phase3_bytes, s.gates, digest);
            emit("secure", "total", s.phase1_ms + s.phase2_ms + s.phase3_ms,
                 s.submission_bytes + s.phase2_bytes + s.phase3_bytes, s.gates, digest);
        }
    }

    // averaged rows per (mode, phase), in first-seen order
    std::vector<std::pair<std::string, std::string>> keys;
    std::map<std::pair<std::string, std::string>, std::pair<BenchRecord, uint32_t>> acc;
    for (const BenchRecord& r : rows) {
        auto key = std::make_pair(r.mode, r.phase);
        auto it = acc.find(key);
        if (it == acc.end()) {
            keys.push_back(key);
            BenchRecord a = r;
            a.digest = "";
            acc.emplace(key, std::make_pair(a, 1u));
        } else {
            it->second.first.ms += r.ms;
            it->second.first.bytes += r.bytes;
            it->second.first.gates += r.gates;
            it->second.second++;
        }
    }
    std::vector<BenchRecord> avgs;
    for (const auto& key : keys) {
        auto [a, count] = acc.at(key);
        a.ms /= count;
        a.bytes /= count;
        a.gates /= count;
        a.phase += "_avg";
        avgs.push_back(a);
    }
    rows.insert(rows.end(), avgs.begin(), avgs.end());
    return rows;
}

std::string to_csv(const std::vector<BenchRecord>& rows) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const BenchRecord& r : rows) {
        os << r.n << ',' << r.m << ',' << r.bits << ',' << r.mode << ',' << r.phase << ',';
        char ms[32];
        snprintf(ms, sizeof ms, "%.3f", r.ms);
        os << ms << ',' << r.bytes << ',' << r.gates << ',' << r.digest << '\n';
    }
    return os.str();
}

namespace {

// winner status and payment for one participant under a (possibly deviated)
// instance, derived through the op-level auction pipeline
std::pair<bool, uint64_t> settle(const tdsa::AuctionInstance& inst, bool is_seller,
                                 uint64_t participant_id) {
    tdsa::AuctionOutcome out = tdsa::run_tdsa(inst);
    tdsa::GroupSet groups = tdsa::form_groups(tdsa::build_conflict_graph(inst));

    if (is_seller) {
        // winners are the cheapest critical_index-1 sellers
        std::vector<uint64_t> requests;
        for (const auto& s : inst.sellers) requests.push_back(s.request);
        std::vector<uint32_t> order(requests.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](uint32_t a, uint32_t b) { return requests[a] < requests[b]; });
        std::vector<uint64_t> bids_desc;
        for (const auto& grp : groups.groups) {
            std::vector<uint64_t> bids;
            for (uint32_t v : grp) bids.push_back(inst.buyers[v].bid);
            std::stable_sort(bids.begin(), bids.end(), std::greater<>());
            bids_desc.push_back(tdsa::group_bid(bids).group_bid);
        }
        std::sort(bids_desc.begin(), bids_desc.end(), std::greater<>());
        std::vector<uint64_t> requests_asc;
        for (uint32_t idx : order) requests_asc.push_back(requests[idx]);
        tdsa::McAfeeResult mc = tdsa::mcafee_determine(requests_asc, bids_desc);
        for (size_t i = 0; i < order.size(); i++)
            if (inst.sellers[order[i]].id == participant_id)
                return {mc.seller_win[i] != 0, mc.seller_win[i] ? mc.seller_price : 0};
        throw bench_error("participant not found");
    }

    // buyer: winner iff flagged survivor of a winning group
    for (const auto& grp : groups.groups) {
        std::vector<uint32_t> members = grp;
        std::stable_sort(members.begin(), members.end(), [&](uint32_t a, uint32_t b) {
            return inst.buyers[a].bid > inst.buyers[b].bid;
        });
        std::vector<uint64_t> bids;
        for (uint32_t v : members) bids.push_back(inst.buyers[v].bid);
        uint64_t gbid = tdsa::group_bid(bids).group_bid;
        tdsa::WashResult w = tdsa::wash_out(bids, out.group_clearing);
        for (size_t j = 0; j < members.size(); j++)
            if (inst.buyers[members[j]].id == participant_id) {
                bool won = gbid > out.group_clearing && w.survivor[j];
                return {won, won ? w.per_buyer_price : 0};
            }
    }
    throw bench_error("participant not found");
}

}  // namespace

std::vector<DeviationReport> truthfulness_probe(const tdsa::AuctionInstance& instance,
                                                bool is_seller, uint64_t participant_id,
                                                const std::vector<uint64_t>& deviations) {
    uint64_t true_value = 0;
    bool found = false;
    for (const auto& s : instance.sellers)
        if (is_seller && s.id == participant_id) {
            true_value = s.request;
            found = true;
        }
    for (const auto& b : instance.buyers)
        if (!is_seller && b.id == participant_id) {
            true_value = b.bid;
            found = true;
        }
    if (!found) throw bench_error("participant not found in the instance");

    auto utility = [&](bool won, uint64_t payment) -> int64_t {
        if (!won) return 0;
        return is_seller ? int64_t(payment) - int64_t(true_value)
                         : int64_t(true_value) - int64_t(payment);
    };

    auto [won0, pay0] = settle(instance, is_seller, participant_id);
    int64_t u0 = utility(won0, pay0);

    std::vector<DeviationReport> reports;
    for (uint64_t dev : deviations) {
        tdsa::AuctionInstance mod = instance;
        for (auto& s : mod.sellers)
            if (is_seller && s.id == participant_id) s.request = dev;
        for (auto& b : mod.buyers)
            if (!is_seller && b.id == participant_id) b.bid = dev;
        auto [won, pay] = settle(mod, is_seller, participant_id);
        DeviationReport r;
        r.is_seller = is_seller;
        r.participant_id = participant_id;
        r.true_value = true_value;
        r.deviated_value = dev;
        r.utility_truthful = u0;
        r.utility_deviated = utility(won, pay);
        r.profitable = r.utility_deviated > u0;
        reports.push_back(r);
    }
    return reports;
}

}  // namespace sdsa::bench
