#include "sdsa/tdsa.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "json.hpp"
#include "sdsa/bytes.hpp"

namespace sdsa::tdsa {

void AuctionInstance::validate(unsigned value_bits) const {
    if (sellers.empty() || buyers.empty())
        throw instance_error("need at least one seller and one buyer");
    uint64_t limit = value_bits >= 64 ? UINT64_MAX : (uint64_t(1) << value_bits);
    std::set<uint64_t> ids;
    for (const Seller& s : sellers) {
        if (s.id == 0 || s.id >= limit) throw instance_error("seller id out of range");
        if (s.request >= limit) throw instance_error("request does not fit value field");
        if (!ids.insert(s.id).second) throw instance_error("duplicate seller id");
    }
    ids.clear();
    for (const Buyer& b : buyers) {
        if (b.id == 0 || b.id >= limit) throw instance_error("buyer id out of range");
        if (b.bid >= limit) throw instance_error("bid does not fit value field");
        if (!ids.insert(b.id).second) throw instance_error("duplicate buyer id");
    }
}

size_t ConflictGraph::degree(size_t i) const {
    size_t d = 0;
    for (size_t j = 0; j < n_; j++) d += adj_[i * n_ + j];
    return d;
}

size_t GroupSet::max_group_size() const {
    size_t r = 0;
    for (const auto& g : groups) r = std::max(r, g.size());
    return r;
}

ConflictGraph build_conflict_graph(const AuctionInstance& instance) {
    const auto& buyers = instance.buyers;
    ConflictGraph g(buyers.size());
    unsigned __int128 range2 =
        (unsigned __int128)instance.interference_range * instance.interference_range;
    for (size_t i = 0; i < buyers.size(); i++) {
        for (size_t j = i + 1; j < buyers.size(); j++) {
            __int128 dx = __int128(buyers[i].x) - buyers[j].x;
            __int128 dy = __int128(buyers[i].y) - buyers[j].y;
            unsigned __int128 d2 = (unsigned __int128)(dx * dx) + (unsigned __int128)(dy * dy);
            if (d2 <= range2) g.add_edge(i, j);
        }
    }
    return g;
}

GroupSet form_groups(const ConflictGraph& graph) {
    size_t n = graph.size();
    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        return graph.degree(a) > graph.degree(b);
    });

    std::vector<int> color(n, -1);
    int max_color = -1;
    for (uint32_t v : order) {
        std::vector<uint8_t> used(size_t(max_color) + 2, 0);
        for (size_t u = 0; u < n; u++)
            if (graph.edge(v, u) && color[u] >= 0) used[color[u]] = 1;
        int c = 0;
        while (used[c]) c++;
        color[v] = c;
        max_color = std::max(max_color, c);
    }

    GroupSet gs;
    gs.groups.resize(size_t(max_color) + 1);
    for (uint32_t v = 0; v < n; v++) gs.groups[color[v]].push_back(v);
    return gs;
}

GroupBid group_bid(const std::vector<uint64_t>& bids_desc) {
    GroupBid gb;
    gb.virtual_bids.resize(bids_desc.size());
    for (size_t j = 1; j <= bids_desc.size(); j++) {
        gb.virtual_bids[j - 1] = bids_desc[j - 1] * j;
        gb.group_bid = std::max(gb.group_bid, gb.virtual_bids[j - 1]);
    }
    return gb;
}

McAfeeResult mcafee_determine(const std::vector<uint64_t>& requests_asc,
                              const std::vector<uint64_t>& group_bids_desc) {
    McAfeeResult r;
    r.seller_win.assign(requests_asc.size(), 0);
    r.group_win.assign(group_bids_desc.size(), 0);
    size_t m = std::min(requests_asc.size(), group_bids_desc.size());
    for (size_t phi = 1; phi <= m; phi++) {
        bool eligible = group_bids_desc[phi - 1] >= requests_asc[phi - 1];
        if (phi >= 2) eligible = eligible && group_bids_desc[phi - 1] != group_bids_desc[phi - 2];
        if (eligible) r.critical_index = phi;
    }
    if (r.critical_index == 0) return r;
    r.seller_price = requests_asc[r.critical_index - 1];
    r.group_price = group_bids_desc[r.critical_index - 1];
    for (size_t i = 0; i + 1 < r.critical_index; i++) {
        r.seller_win[i] = 1;
        r.group_win[i] = 1;
    }
    return r;
}

WashResult wash_out(const std::vector<uint64_t>& bids_desc, uint64_t group_price) {
    WashResult w;
    w.survivor.assign(bids_desc.size(), 0);
    for (size_t j = bids_desc.size(); j >= 1; j--) {
        if (bids_desc[j - 1] * j > group_price) {
            w.winner_count = j;
            break;
        }
    }
    for (size_t j = 0; j < w.winner_count; j++) w.survivor[j] = 1;
    if (w.winner_count > 0) w.per_buyer_price = group_price / w.winner_count;
    return w;
}

AuctionOutcome run_tdsa(const AuctionInstance& instance) {
    return run_tdsa_pinned(instance, form_groups(build_conflict_graph(instance)));
}

AuctionOutcome run_tdsa_pinned(const AuctionInstance& instance, const GroupSet& groups) {
    const size_t M = instance.sellers.size();
    const size_t T = groups.groups.size();

    std::vector<uint8_t> seen(instance.buyers.size(), 0);
    for (const auto& g : groups.groups)
        for (uint32_t v : g) {
            if (v >= instance.buyers.size() || seen[v])
                throw instance_error("grouping must partition the buyers");
            seen[v] = 1;
        }
    if (size_t(std::count(seen.begin(), seen.end(), 1)) != instance.buyers.size())
        throw instance_error("grouping must cover all buyers");

    // per-group bid order: non-ascending bid, stable w.r.t. member order
    std::vector<std::vector<uint32_t>> sorted_members(T);
    std::vector<uint64_t> group_bids(T);
    for (size_t t = 0; t < T; t++) {
        sorted_members[t] = groups.groups[t];
        std::stable_sort(sorted_members[t].begin(), sorted_members[t].end(),
                         [&](uint32_t a, uint32_t b) {
                             return instance.buyers[a].bid > instance.buyers[b].bid;
                         });
        std::vector<uint64_t> bids;
        bids.reserve(sorted_members[t].size());
        for (uint32_t v : sorted_members[t]) bids.push_back(instance.buyers[v].bid);
        group_bids[t] = group_bid(bids).group_bid;
    }

    // sellers in non-descending request order, stable
    std::vector<uint32_t> seller_order(M);
    std::iota(seller_order.begin(), seller_order.end(), 0);
    std::stable_sort(seller_order.begin(), seller_order.end(), [&](uint32_t a, uint32_t b) {
        return instance.sellers[a].request < instance.sellers[b].request;
    });
    std::vector<uint64_t> requests_asc(M);
    for (size_t i = 0; i < M; i++) requests_asc[i] = instance.sellers[seller_order[i]].request;

    std::vector<uint64_t> bids_desc = group_bids;
    std::sort(bids_desc.begin(), bids_desc.end(), std::greater<>());

    McAfeeResult mc = mcafee_determine(requests_asc, bids_desc);

    AuctionOutcome out;
    out.seller_clearing = mc.seller_price;
    out.group_clearing = mc.group_price;

    for (size_t i = 0; i < M; i++) {
        const Seller& s = instance.sellers[seller_order[i]];
        out.seller_prices.push_back({s.id, mc.seller_win[i] ? mc.seller_price : 0});
    }

    for (size_t t = 0; t < T; t++) {
        bool winning = group_bids[t] > mc.group_price;
        std::vector<uint64_t> bids;
        for (uint32_t v : sorted_members[t]) bids.push_back(instance.buyers[v].bid);
        WashResult w = wash_out(bids, mc.group_price);
        for (size_t j = 0; j < sorted_members[t].size(); j++) {
            const Buyer& b = instance.buyers[sorted_members[t][j]];
            uint64_t price = (winning && w.survivor[j]) ? w.per_buyer_price : 0;
            out.buyer_prices.push_back({b.id, price});
        }
    }

    auto by_id = [](const PriceEntry& a, const PriceEntry& b) { return a.id < b.id; };
    std::sort(out.seller_prices.begin(), out.seller_prices.end(), by_id);
    std::sort(out.buyer_prices.begin(), out.buyer_prices.end(), by_id);
    return out;
}

std::vector<uint8_t> AuctionOutcome::serialize() const {
    Bytes out;
    put_u64(out, seller_clearing);
    put_u64(out, group_clearing);
    put_u32(out, uint32_t(seller_prices.size()));
    for (const PriceEntry& e : seller_prices) {
        put_u64(out, e.id);
        put_u64(out, e.price);
    }
    put_u32(out, uint32_t(buyer_prices.size()));
    for (const PriceEntry& e : buyer_prices) {
        put_u64(out, e.id);
        put_u64(out, e.price);
    }
    return out;
}

AuctionOutcome AuctionOutcome::deserialize(const std::vector<uint8_t>& bytes) {
    ByteReader r(bytes);
    AuctionOutcome o;
    o.seller_clearing = r.u64();
    o.group_clearing = r.u64();
    uint32_t ns = r.u32();
    for (uint32_t i = 0; i < ns; i++) {
        uint64_t id = r.u64(), price = r.u64();
        o.seller_prices.push_back({id, price});
    }
    uint32_t nb = r.u32();
    for (uint32_t i = 0; i < nb; i++) {
        uint64_t id = r.u64(), price = r.u64();
        o.buyer_prices.push_back({id, price});
    }
    r.expect_done();
    return o;
}

std::string AuctionOutcome::digest() const {
    Bytes b = serialize();
    uint8_t d[SHA256_DIGEST_LENGTH];
    SHA256(b.data(), b.size(), d);
    return to_hex(std::span<const uint8_t>(d, 16));
}

std::string AuctionInstance::to_json() const {
    nlohmann::json j;
    j["sellers"] = nlohmann::json::array();
    for (const Seller& s : sellers) j["sellers"].push_back({{"id", s.id}, {"q", s.request}});
    j["buyers"] = nlohmann::json::array();
    for (const Buyer& b : buyers)
        j["buyers"].push_back({{"id", b.id}, {"b", b.bid}, {"x", b.x}, {"y", b.y}});
    j["range"] = interference_range;
    return j.dump(2);
}

AuctionInstance AuctionInstance::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    AuctionInstance inst;
    for (const auto& s : j.at("sellers"))
        inst.sellers.push_back({s.at("id").get<uint64_t>(), s.at("q").get<uint64_t>()});
    for (const auto& b : j.at("buyers"))
        inst.buyers.push_back({b.at("id").get<uint64_t>(), b.at("b").get<uint64_t>(),
                               b.at("x").get<int64_t>(), b.at("y").get<int64_t>()});
    inst.interference_range = j.at("range").get<uint64_t>();
    return inst;
}

std::string AuctionOutcome::to_json() const {
    nlohmann::json j;
    j["seller_clearing"] = seller_clearing;
    j["group_clearing"] = group_clearing;
    j["sellers"] = nlohmann::json::array();
    for (const PriceEntry& e : seller_prices)
        j["sellers"].push_back({{"id", e.id}, {"price", e.price}});
    j["buyers"] = nlohmann::json::array();
    for (const PriceEntry& e : buyer_prices)
        j["buyers"].push_back({{"id", e.id}, {"price", e.price}});
    return j.dump(2);
}

}  // namespace sdsa::tdsa
