#include "sdsa/tdsa.hpp"

#include <fstream>
#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "sdsa/rng.hpp"

using namespace sdsa;
using namespace sdsa::tdsa;

namespace {

AuctionInstance random_instance(Rng& rng, size_t sellers, size_t buyers, uint64_t vmax,
                                uint64_t area = 2000, uint64_t range = 500) {
    AuctionInstance inst;
    inst.interference_range = range;
    for (size_t i = 0; i < sellers; i++) inst.sellers.push_back({i + 1, rng.below(vmax)});
    for (size_t i = 0; i < buyers; i++)
        inst.buyers.push_back({i + 1, rng.below(vmax), int64_t(rng.below(area)),
                               int64_t(rng.below(area))});
    return inst;
}

uint64_t price_of(const std::vector<PriceEntry>& v, uint64_t id) {
    for (const auto& e : v)
        if (e.id == id) return e.price;
    FAIL("id not present");
    return 0;
}

}  // namespace

TEST_CASE("conflict graph follows the interference range") {
    AuctionInstance inst;
    inst.interference_range = 500;
    inst.sellers = {{1, 10}};
    inst.buyers = {{1, 5, 0, 0}, {2, 5, 400, 0}, {3, 5, 900, 0}};
    ConflictGraph g = build_conflict_graph(inst);
    CHECK(g.edge(0, 1));        // 400m apart
    CHECK(g.edge(1, 2));        // exactly 500m: threshold is inclusive
    CHECK_FALSE(g.edge(0, 2));  // 900m apart
}

TEST_CASE("single buyer yields an empty graph") {
    AuctionInstance inst;
    inst.sellers = {{1, 10}};
    inst.buyers = {{1, 5, 100, 100}};
    ConflictGraph g = build_conflict_graph(inst);
    CHECK(g.size() == 1);
    CHECK_FALSE(g.edge(0, 0));
}

TEST_CASE("adjacency matches the pairwise distance oracle") {
    Rng rng(42);
    AuctionInstance inst = random_instance(rng, 2, 50, 64);
    ConflictGraph g = build_conflict_graph(inst);
    for (size_t i = 0; i < 50; i++)
        for (size_t j = 0; j < 50; j++) {
            bool expect = i != j && oracle::conflicts(inst.buyers[i].x, inst.buyers[i].y,
                                                      inst.buyers[j].x, inst.buyers[j].y,
                                                      inst.interference_range);
            CHECK(g.edge(i, j) == expect);
        }
}

TEST_CASE("grouping the empty graph keeps everyone together") {
    ConflictGraph g(5);
    GroupSet gs = form_groups(g);
    REQUIRE(gs.groups.size() == 1);
    CHECK(gs.groups[0] == std::vector<uint32_t>{0, 1, 2, 3, 4});
}

TEST_CASE("grouping a complete graph forces singletons") {
    ConflictGraph g(4);
    for (size_t i = 0; i < 4; i++)
        for (size_t j = i + 1; j < 4; j++) g.add_edge(i, j);
    GroupSet gs = form_groups(g);
    CHECK(gs.groups.size() == 4);
    for (const auto& grp : gs.groups) CHECK(grp.size() == 1);
}

TEST_CASE("groups are always independent sets") {
    Rng rng(43);
    for (int trial = 0; trial < 30; trial++) {
        size_t n = 2 + rng.below(30);
        ConflictGraph g(n);
        for (size_t i = 0; i < n; i++)
            for (size_t j = i + 1; j < n; j++)
                if (rng.below(100) < 30) g.add_edge(i, j);
        GroupSet gs = form_groups(g);
        size_t covered = 0;
        for (const auto& grp : gs.groups) {
            covered += grp.size();
            for (size_t a = 0; a < grp.size(); a++)
                for (size_t b = a + 1; b < grp.size(); b++)
                    CHECK_FALSE(g.edge(grp[a], grp[b]));
        }
        CHECK(covered == n);
    }
}

TEST_CASE("grouping is bid-independent and deterministic") {
    Rng rng(44);
    AuctionInstance inst = random_instance(rng, 2, 24, 64);
    GroupSet a = form_groups(build_conflict_graph(inst));
    AuctionInstance permuted = inst;
    // rotate the bids; locations unchanged
    for (size_t i = 0; i < permuted.buyers.size(); i++)
        permuted.buyers[i].bid = inst.buyers[(i + 7) % inst.buyers.size()].bid;
    GroupSet b = form_groups(build_conflict_graph(permuted));
    CHECK(a.groups == b.groups);
}

TEST_CASE("virtual group bids") {
    GroupBid gb = group_bid({10, 9, 2});
    CHECK(gb.virtual_bids == std::vector<uint64_t>{10, 18, 6});
    CHECK(gb.group_bid == 18);

    CHECK(group_bid({7}).group_bid == 7);
    CHECK(group_bid({5, 5, 5, 5}).group_bid == 20);  // monotone in j for equal bids
}

TEST_CASE("winner determination on the worked example") {
    McAfeeResult r = mcafee_determine({20, 25, 28}, {40, 36, 30});
    CHECK(r.critical_index == 3);
    CHECK(r.seller_price == 28);
    CHECK(r.group_price == 30);
    CHECK(r.seller_win == std::vector<uint8_t>{1, 1, 0});
    CHECK(r.group_win == std::vector<uint8_t>{1, 1, 0});
}

TEST_CASE("no profitable index means no trade") {
    McAfeeResult r = mcafee_determine({50}, {10});
    CHECK(r.critical_index == 0);
    CHECK(r.seller_price == 0);
    CHECK(r.group_price == 0);
    CHECK(r.seller_win == std::vector<uint8_t>{0});
}

TEST_CASE("tie handling at the critical index") {
    // phi = 2 disqualified by the tie rule, phi = 1 remains eligible
    McAfeeResult r = mcafee_determine({5, 5}, {10, 10});
    CHECK(r.critical_index == 1);
    CHECK(r.seller_price == 5);
    CHECK(r.group_price == 10);
    CHECK(r.seller_win == std::vector<uint8_t>{0, 0});  // top 0 sellers win

    // every candidate disqualified
    McAfeeResult none = mcafee_determine({5, 5}, {4, 4});
    CHECK(none.critical_index == 0);
}

TEST_CASE("winner determination matches the brute-force scan") {
    Rng rng(45);
    for (int trial = 0; trial < 500; trial++) {
        size_t m = 1 + rng.below(8), t = 1 + rng.below(8);
        std::vector<uint64_t> q, b;
        for (size_t i = 0; i < m; i++) q.push_back(rng.below(64));
        for (size_t i = 0; i < t; i++) b.push_back(rng.below(64));
        std::sort(q.begin(), q.end());
        std::sort(b.begin(), b.end(), std::greater<>());
        McAfeeResult got = mcafee_determine(q, b);
        oracle::McAfeeScan want = oracle::mcafee_scan(q, b);
        CHECK(got.critical_index == want.critical);
        CHECK(got.seller_price == want.seller_price);
        CHECK(got.group_price == want.group_price);
    }
}

TEST_CASE("washing out keeps the largest affordable virtual group") {
    WashResult w = wash_out({15, 12, 11, 2}, 30);  // virtual bids 15, 24, 33, 8
    CHECK(w.winner_count == 3);
    CHECK(w.survivor == std::vector<uint8_t>{1, 1, 1, 0});
    CHECK(w.per_buyer_price == 10);

    // a washed buyer's bid can never exceed the per-buyer price
    CHECK(uint64_t(2) <= w.per_buyer_price);

    WashResult none = wash_out({3, 2}, 50);
    CHECK(none.winner_count == 0);
    CHECK(none.per_buyer_price == 0);
    CHECK(none.survivor == std::vector<uint8_t>{0, 0});
}

TEST_CASE("washing matches the scan oracle on random groups") {
    Rng rng(46);
    for (int trial = 0; trial < 500; trial++) {
        std::vector<uint64_t> bids;
        size_t r = 1 + rng.below(10);
        for (size_t i = 0; i < r; i++) bids.push_back(rng.below(64));
        std::sort(bids.begin(), bids.end(), std::greater<>());
        uint64_t price = rng.below(128);
        WashResult w = wash_out(bids, price);
        CHECK(w.winner_count == oracle::washing_scan(bids, price));
    }
}

TEST_CASE("the worked instance settles at 28 and 30") {
    AuctionInstance inst = oracle::demo_instance();
    GroupSet gs = form_groups(build_conflict_graph(inst));
    REQUIRE(gs.groups.size() == 3);
    CHECK(gs.groups[0] == std::vector<uint32_t>{0, 3, 6, 7});
    CHECK(gs.groups[1] == std::vector<uint32_t>{1, 4});
    CHECK(gs.groups[2] == std::vector<uint32_t>{2, 5});

    AuctionOutcome out = run_tdsa(inst);
    CHECK(out.seller_clearing == 28);
    CHECK(out.group_clearing == 30);
    CHECK(price_of(out.seller_prices, 1) == 28);
    CHECK(price_of(out.seller_prices, 2) == 28);
    CHECK(price_of(out.seller_prices, 3) == 0);

    // first group: buyers 1, 4, 7 survive at 10 each, buyer 8 washed out
    CHECK(price_of(out.buyer_prices, 1) == 10);
    CHECK(price_of(out.buyer_prices, 4) == 10);
    CHECK(price_of(out.buyer_prices, 7) == 10);
    CHECK(price_of(out.buyer_prices, 8) == 0);
    // second group: two survivors share the group price, 30/2 each
    CHECK(price_of(out.buyer_prices, 2) == 15);
    CHECK(price_of(out.buyer_prices, 5) == 15);
    // third group bids exactly the clearing price and loses
    CHECK(price_of(out.buyer_prices, 3) == 0);
    CHECK(price_of(out.buyer_prices, 6) == 0);
}

TEST_CASE("one seller and one buyer can never trade") {
    AuctionInstance inst;
    inst.sellers = {{1, 5}};
    inst.buyers = {{1, 50, 0, 0}};
    AuctionOutcome out = run_tdsa(inst);
    CHECK(price_of(out.seller_prices, 1) == 0);
    CHECK(price_of(out.buyer_prices, 1) == 0);
}

TEST_CASE("outcome invariants hold across random instances") {
    Rng rng(47);
    for (int trial = 0; trial < 1000; trial++) {
        AuctionInstance inst =
            random_instance(rng, 1 + rng.below(6), 1 + rng.below(24), 64, 1500);
        AuctionOutcome out = run_tdsa(inst);

        REQUIRE(out.seller_prices.size() == inst.sellers.size());
        REQUIRE(out.buyer_prices.size() == inst.buyers.size());
        for (size_t i = 1; i < out.seller_prices.size(); i++)
            CHECK(out.seller_prices[i - 1].id < out.seller_prices[i].id);
        for (size_t i = 1; i < out.buyer_prices.size(); i++)
            CHECK(out.buyer_prices[i - 1].id < out.buyer_prices[i].id);

        size_t paid_sellers = 0;
        for (const auto& e : out.seller_prices)
            if (e.price != 0) {
                CHECK(e.price == out.seller_clearing);
                paid_sellers++;
            }
        // winning sellers ask no more than the clearing price
        std::map<uint64_t, uint64_t> ask;
        for (const auto& s : inst.sellers) ask[s.id] = s.request;
        for (const auto& e : out.seller_prices)
            if (e.price != 0) CHECK(ask[e.id] <= out.seller_clearing);

        // paying buyers pay strictly less than they bid
        std::map<uint64_t, uint64_t> bid;
        for (const auto& b : inst.buyers) bid[b.id] = b.bid;
        for (const auto& e : out.buyer_prices)
            if (e.price != 0) CHECK(e.price < bid[e.id]);

        if (paid_sellers > 0) CHECK(out.group_clearing >= out.seller_clearing);
    }
}

TEST_CASE("golden files pin the worked instance and its outcome") {
    auto slurp = [](const std::string& path) {
        std::ifstream in(path);
        REQUIRE(in.good());
        return std::string(std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>());
    };
    AuctionInstance inst =
        AuctionInstance::from_json(slurp(std::string(FIXTURE_DIR) + "/demo_instance.json"));
    // compare through the JSON text, which is what the fixture freezes
    std::string got = run_tdsa(inst).to_json() + "\n";
    CHECK(got == slurp(std::string(FIXTURE_DIR) + "/demo_outcome.json"));
}

TEST_CASE("instances and outcomes roundtrip through JSON") {
    Rng rng(48);
    AuctionInstance inst = random_instance(rng, 3, 8, 64);
    AuctionInstance back = AuctionInstance::from_json(inst.to_json());
    CHECK(back.interference_range == inst.interference_range);
    REQUIRE(back.sellers.size() == inst.sellers.size());
    REQUIRE(back.buyers.size() == inst.buyers.size());
    for (size_t i = 0; i < inst.buyers.size(); i++) {
        CHECK(back.buyers[i].id == inst.buyers[i].id);
        CHECK(back.buyers[i].bid == inst.buyers[i].bid);
        CHECK(back.buyers[i].x == inst.buyers[i].x);
    }
    AuctionOutcome out = run_tdsa(inst);
    CHECK(AuctionOutcome::deserialize(out.serialize()) == out);
    CHECK(out.digest() == run_tdsa(back).digest());
}

TEST_CASE("instance validation") {
    AuctionInstance inst;
    CHECK_THROWS_AS(inst.validate(16), instance_error);
    inst.sellers = {{1, 10}, {1, 20}};
    inst.buyers = {{1, 5, 0, 0}};
    CHECK_THROWS_AS(inst.validate(16), instance_error);  // duplicate seller id
    inst.sellers = {{0, 10}};
    CHECK_THROWS_AS(inst.validate(16), instance_error);  // id 0 reserved
    inst.sellers = {{1, 1 << 16}};
    CHECK_THROWS_AS(inst.validate(16), instance_error);  // request too wide
    inst.sellers = {{1, 10}};
    CHECK_NOTHROW(inst.validate(16));
}
