#include "sdsa/oblivious.hpp"

#include "doctest.h"
#include "oracles.hpp"
#include "sdsa/circuits/garble.hpp"
#include "sdsa/rng.hpp"
#include "sdsa/synth.hpp"

using namespace sdsa;
using namespace sdsa::oblivious;

namespace {

// random instance pre-grouped to a fixed layout, as the protocol would pad it
struct GroupedInstance {
    tdsa::AuctionInstance instance;
    tdsa::GroupSet groups;
    ObliviousLayout layout;
    SharedInputs plain_inputs;
};

GroupedInstance make_grouped(Rng& rng, uint32_t sellers, uint32_t buyers, unsigned bits,
                             uint64_t vmax) {
    GroupedInstance g;
    g.instance.interference_range = 500;
    for (uint32_t i = 0; i < sellers; i++)
        g.instance.sellers.push_back({i + 1, rng.below(vmax)});
    for (uint32_t i = 0; i < buyers; i++)
        g.instance.buyers.push_back({i + 1, rng.below(vmax), int64_t(rng.below(2000)),
                                     int64_t(rng.below(2000))});
    g.groups = tdsa::form_groups(tdsa::build_conflict_graph(g.instance));
    g.layout = ObliviousLayout{sellers, uint32_t(g.groups.groups.size()),
                               uint32_t(g.groups.max_group_size()), bits};

    std::vector<std::vector<tdsa::Buyer>> grouped;
    for (const auto& grp : g.groups.groups) {
        std::vector<tdsa::Buyer> row;
        for (uint32_t v : grp) row.push_back(g.instance.buyers[v]);
        grouped.push_back(std::move(row));
    }
    g.plain_inputs = SharedInputs::from_plain(g.layout, g.instance.sellers, grouped);
    return g;
}

// re-splits plain inputs into random additive shares
SharedInputs reshare(const SharedInputs& plain, const ObliviousLayout& layout, Rng& rng) {
    uint64_t mod = uint64_t(1) << layout.value_bits;
    auto split = [&](const SlotShares& s) {
        uint64_t x = (s.share1 + s.share2) % mod;
        uint64_t a = rng.below(mod);
        return SlotShares{a, (x - a) & (mod - 1)};
    };
    SharedInputs out = plain;
    for (auto& s : out.sellers) {
        s.id = split(s.id);
        s.request = split(s.request);
    }
    for (auto& grp : out.groups)
        for (auto& b : grp) {
            b.id = split(b.id);
            b.bid = split(b.bid);
        }
    return out;
}

}  // namespace

TEST_CASE("sorting networks sort and their shape is input-independent") {
    Rng rng(1);
    for (uint32_t n : {1u, 2u, 3u, 5u, 8u, 16u, 33u, 64u}) {
        std::vector<std::pair<uint32_t, uint32_t>> shape;
        int trials = n == 16 ? 256 : 8;  // length 16 gets the full battery
        for (int trial = 0; trial < trials; trial++) {
            std::vector<uint64_t> v(n);
            for (auto& x : v) x = rng.below(50);
            SortTrace tr = oblivious_sort(v, false);
            CHECK(tr.values == oracle::sorted_copy(v, false));
            SortTrace td = oblivious_sort(v, true);
            CHECK(td.values == oracle::sorted_copy(v, true));
            if (trial == 0) shape = tr.compare_exchanges;
            CHECK(tr.compare_exchanges == shape);
        }
    }
    // already-sorted input passes through unchanged
    std::vector<uint64_t> sorted{1, 2, 3, 4, 5};
    CHECK(oblivious_sort(sorted, false).values == sorted);
    CHECK(oblivious_sort({3, 1, 2}, false).values == std::vector<uint64_t>{1, 2, 3});
}

TEST_CASE("flag computation steps match the scan oracles") {
    McAfeeFlags f = mcafee_flags({20, 25, 28}, {40, 36, 30}, 3);
    CHECK(f.prefix == std::vector<uint8_t>{1, 1, 1});
    CHECK(f.critical == std::vector<uint8_t>{0, 0, 1});
    CHECK(f.seller_price == 28);
    CHECK(f.group_price == 30);
    CHECK(f.seller_win == std::vector<uint8_t>{1, 1, 0});

    // eligibility (1,1,0): prefix (1,1,0), critical at 2
    McAfeeFlags g = mcafee_flags({10, 20, 99}, {50, 40, 40}, 3);
    CHECK(g.prefix == std::vector<uint8_t>{1, 1, 0});
    CHECK(g.critical == std::vector<uint8_t>{0, 1, 0});

    McAfeeFlags none = mcafee_flags({50}, {10}, 1);
    CHECK(none.prefix == std::vector<uint8_t>{0});
    CHECK(none.critical == std::vector<uint8_t>{0});
    CHECK(none.seller_price == 0);
    CHECK(none.group_price == 0);
}

TEST_CASE("flag structure invariants across random inputs") {
    Rng rng(2);
    for (int trial = 0; trial < 1000; trial++) {
        size_t m = 1 + rng.below(8);
        std::vector<uint64_t> q, b;
        for (size_t i = 0; i < m; i++) q.push_back(rng.below(64));
        for (size_t i = 0; i < m; i++) b.push_back(rng.below(64));
        std::sort(q.begin(), q.end());
        std::sort(b.begin(), b.end(), std::greater<>());

        McAfeeFlags f = mcafee_flags(q, b, m);
        oracle::McAfeeScan scan = oracle::mcafee_scan(q, b);

        // lambda is a prefix of ones ending at the critical index
        for (size_t i = 0; i < m; i++) CHECK(f.prefix[i] == (i + 1 <= scan.critical ? 1 : 0));
        // at most one critical marker, exactly at the scan's index
        size_t marks = 0;
        for (size_t i = 0; i < m; i++)
            if (f.critical[i]) {
                marks++;
                CHECK(i + 1 == scan.critical);
            }
        CHECK(marks <= 1);
        CHECK(f.seller_price == scan.seller_price);
        CHECK(f.group_price == scan.group_price);
        // seller winner flags shift lambda by one
        for (size_t i = 0; i + 1 < m; i++) CHECK(f.seller_win[i] == f.prefix[i + 1]);
        CHECK(f.seller_win[m - 1] == 0);
    }
}

TEST_CASE("washing flags mask losers and count survivors") {
    WashingFlags w = washing_flags({15, 24, 33, 8}, 33, 30);
    CHECK(w.group_win == 1);
    CHECK(w.buyer_win == std::vector<uint8_t>{1, 1, 1, 0});
    CHECK(w.winner_count == 3);
    CHECK(w.group_member_price == 10);

    WashingFlags lose = washing_flags({15, 24, 33, 8}, 33, 40);
    CHECK(lose.group_win == 0);
    CHECK(lose.buyer_win == std::vector<uint8_t>{0, 0, 0, 0});
    CHECK(lose.winner_count == 0);
    CHECK(lose.group_member_price == 0);

    // padded null buyers can never win
    WashingFlags padded = washing_flags({40, 0, 0}, 40, 30);
    CHECK(padded.buyer_win == std::vector<uint8_t>{1, 0, 0});
    CHECK(padded.winner_count == 1);
}

TEST_CASE("washing flags match the scan oracle, including the full-group case") {
    Rng rng(3);
    for (int trial = 0; trial < 1000; trial++) {
        size_t r = 1 + rng.below(8);
        std::vector<uint64_t> bids;
        for (size_t i = 0; i < r; i++) bids.push_back(rng.below(64));
        std::sort(bids.begin(), bids.end(), std::greater<>());
        std::vector<uint64_t> vb(r);
        uint64_t gbid = 0;
        for (size_t j = 0; j < r; j++) {
            vb[j] = bids[j] * (j + 1);
            gbid = std::max(gbid, vb[j]);
        }
        uint64_t price = rng.below(96);
        WashingFlags w = washing_flags(vb, gbid, price);
        size_t expect = gbid > price ? oracle::washing_scan(bids, price) : 0;
        CHECK(w.winner_count == expect);
        for (size_t j = 0; j < r; j++) CHECK(w.buyer_win[j] == (j < expect ? 1 : 0));
    }
}

TEST_CASE("the oblivious auction equals the plaintext auction with pinned groups") {
    Rng rng(4);
    for (int trial = 0; trial < 60; trial++) {
        GroupedInstance g =
            make_grouped(rng, 1 + rng.below(5), 1 + rng.below(16), 16, 64);
        ObliviousResult res = oblivious_tdsa(g.layout, g.plain_inputs);
        tdsa::AuctionOutcome want = tdsa::run_tdsa_pinned(g.instance, g.groups);
        CHECK(res.outcome == want);

        // and again with a random share split
        SharedInputs shared = reshare(g.plain_inputs, g.layout, rng);
        CHECK(oblivious_tdsa(g.layout, shared).outcome == want);
    }
}

TEST_CASE("request ties at the winner boundary follow submission order") {
    // two sellers ask the same price but only one trade clears; the earlier
    // submission must win in both the plaintext and the oblivious path
    for (int swapped = 0; swapped < 2; swapped++) {
        tdsa::AuctionInstance inst;
        uint64_t first = swapped ? 2 : 1, second = swapped ? 1 : 2;
        inst.sellers = {{first, 10}, {second, 10}, {3, 50}};
        inst.buyers = {{1, 30, 0, 0}, {2, 20, 1200, 0}, {3, 5, 2400, 0}};
        tdsa::GroupSet groups;
        groups.groups = {{0}, {1}, {2}};  // three singleton groups, bids 30/20/5

        tdsa::AuctionOutcome plain = tdsa::run_tdsa_pinned(inst, groups);
        // critical index 2: one winning seller at price 10, one group at 20
        CHECK(plain.seller_clearing == 10);
        CHECK(plain.group_clearing == 20);
        uint64_t winner = 0;
        for (const auto& e : plain.seller_prices)
            if (e.price != 0) winner = e.id;
        CHECK(winner == first);

        ObliviousLayout layout{3, 3, 1, 16};
        std::vector<std::vector<tdsa::Buyer>> grouped = {
            {inst.buyers[0]}, {inst.buyers[1]}, {inst.buyers[2]}};
        ObliviousResult res = oblivious_tdsa(
            layout, SharedInputs::from_plain(layout, inst.sellers, grouped));
        CHECK(res.outcome == plain);
    }
}

TEST_CASE("all-zero bids produce an outcome with every price zero") {
    Rng rng(5);
    GroupedInstance g = make_grouped(rng, 3, 8, 16, 64);
    for (auto& grp : g.plain_inputs.groups)
        for (auto& b : grp) b.bid = {0, 0};
    for (auto& b : g.instance.buyers) b.bid = 0;
    ObliviousResult res = oblivious_tdsa(g.layout, g.plain_inputs);
    CHECK(res.outcome == tdsa::run_tdsa_pinned(g.instance, g.groups));
    CHECK(res.outcome.seller_clearing == 0);
    CHECK(res.outcome.group_clearing == 0);
    for (const auto& e : res.outcome.seller_prices) CHECK(e.price == 0);
    for (const auto& e : res.outcome.buyer_prices) CHECK(e.price == 0);
}

TEST_CASE("the worked instance settles at 28 and 30 obliviously") {
    tdsa::AuctionInstance inst = oracle::demo_instance();
    tdsa::GroupSet groups = tdsa::form_groups(tdsa::build_conflict_graph(inst));
    ObliviousLayout layout{uint32_t(inst.sellers.size()), uint32_t(groups.groups.size()),
                           uint32_t(groups.max_group_size()), 16};
    std::vector<std::vector<tdsa::Buyer>> grouped;
    for (const auto& grp : groups.groups) {
        std::vector<tdsa::Buyer> row;
        for (uint32_t v : grp) row.push_back(inst.buyers[v]);
        grouped.push_back(std::move(row));
    }
    ObliviousResult res =
        oblivious_tdsa(layout, SharedInputs::from_plain(layout, inst.sellers, grouped));
    CHECK(res.outcome.seller_clearing == 28);
    CHECK(res.outcome.group_clearing == 30);
    CHECK(res.outcome == tdsa::run_tdsa(inst));
}

TEST_CASE("operation traces depend only on the layout") {
    Rng rng(6);
    ObliviousLayout layout{4, 4, 4, 16};
    std::string reference;
    for (int trial = 0; trial < 50; trial++) {
        SharedInputs in;
        for (uint32_t i = 0; i < layout.sellers; i++)
            in.sellers.push_back({{rng.below(1 << 16), rng.below(1 << 16)},
                                  {rng.below(1 << 16), rng.below(1 << 16)}});
        for (uint32_t t = 0; t < layout.groups; t++) {
            std::vector<BuyerShares> row;
            for (uint32_t j = 0; j < layout.group_slots; j++)
                row.push_back({{rng.below(1 << 16), rng.below(1 << 16)},
                               {rng.below(1 << 16), rng.below(1 << 16)}});
            in.groups.push_back(std::move(row));
        }
        ObliviousResult res = oblivious_tdsa(layout, in);
        if (trial == 0) {
            reference = res.trace;
            CHECK(reference.substr(0, 3) == "OP ");
        } else {
            CHECK(res.trace == reference);
        }
    }
}

TEST_CASE("the synthesized circuit computes the oblivious auction") {
    Rng rng(7);
    ObliviousLayout layout{2, 2, 2, 8};
    gc::BooleanCircuit circuit = synthesize_circuit(layout);
    circuit.validate();
    CHECK(circuit.generator_inputs == layout.value_count() * 8);
    CHECK(circuit.evaluator_inputs == layout.value_count() * 8);

    for (int trial = 0; trial < 200; trial++) {
        SharedInputs in;
        for (uint32_t i = 0; i < layout.sellers; i++)
            in.sellers.push_back(
                {{rng.below(256), rng.below(256)}, {rng.below(256), rng.below(256)}});
        for (uint32_t t = 0; t < layout.groups; t++) {
            std::vector<BuyerShares> row;
            for (uint32_t j = 0; j < layout.group_slots; j++)
                row.push_back(
                    {{rng.below(256), rng.below(256)}, {rng.below(256), rng.below(256)}});
            in.groups.push_back(std::move(row));
        }
        auto gen_bits = share_bits(layout, in.flatten(2));
        auto eval_bits = share_bits(layout, in.flatten(1));
        auto out_bits = gc::plain_eval(circuit, gen_bits, eval_bits);
        tdsa::AuctionOutcome got =
            assemble_outcome(layout, words_from_bits(layout, out_bits));
        CHECK(got == oblivious_tdsa(layout, in).outcome);
    }
}

TEST_CASE("share reconstruction inside the circuit wraps modulo 2^K") {
    ObliviousLayout layout{1, 1, 1, 8};
    gc::BooleanCircuit circuit = synthesize_circuit(layout);
    SharedInputs in;
    in.sellers.push_back({{1, 0}, {77, 123}});  // request shares: 77 + 123 = 200 mod 256
    in.groups.push_back({BuyerShares{{1, 0}, {130, 130}}});  // bid 260 mod 256 = 4
    auto got = assemble_outcome(
        layout, words_from_bits(layout, gc::plain_eval(circuit, share_bits(layout, in.flatten(2)),
                                                       share_bits(layout, in.flatten(1)))));
    tdsa::AuctionOutcome want = oblivious_tdsa(layout, in).outcome;
    CHECK(got == want);
    // the reconstructed request really is 200: a lone trade cannot clear it
    CHECK(want.seller_clearing == 0);
}

TEST_CASE("pricing assembly masks losers and drops null slots") {
    std::vector<PricedSellerSlot> sellers = {{3, 1}, {1, 0}, {2, 1}, {0, 0}};
    std::vector<PricedBuyerSlot> buyers = {{5, 0}, {2, 10}, {0, 0}, {9, 10}, {0, 0}};
    tdsa::AuctionOutcome out = oblivious_pricing(sellers, buyers, 28, 30);
    CHECK(out.seller_clearing == 28);
    CHECK(out.group_clearing == 30);
    REQUIRE(out.seller_prices.size() == 3);  // the null pad is gone
    CHECK(out.seller_prices[0] == tdsa::PriceEntry{1, 0});
    CHECK(out.seller_prices[1] == tdsa::PriceEntry{2, 28});
    CHECK(out.seller_prices[2] == tdsa::PriceEntry{3, 28});
    REQUIRE(out.buyer_prices.size() == 3);
    CHECK(out.buyer_prices[0] == tdsa::PriceEntry{2, 10});
    CHECK(out.buyer_prices[1] == tdsa::PriceEntry{5, 0});
    CHECK(out.buyer_prices[2] == tdsa::PriceEntry{9, 10});

    // all flags masked: every price zero
    tdsa::AuctionOutcome zero =
        oblivious_pricing({{1, 0}, {2, 0}}, {{1, 0}, {2, 0}}, 0, 0);
    for (const auto& e : zero.seller_prices) CHECK(e.price == 0);
    for (const auto& e : zero.buyer_prices) CHECK(e.price == 0);
}

TEST_CASE("gate counts grow with the layout and stay within budget") {
    size_t small = synthesize_circuit(ObliviousLayout{2, 2, 2, 8}).gates.size();
    size_t wider = synthesize_circuit(ObliviousLayout{2, 2, 2, 16}).gates.size();
    size_t bigger = synthesize_circuit(ObliviousLayout{4, 4, 4, 8}).gates.size();
    CHECK(small < wider);
    CHECK(small < bigger);
    CHECK_THROWS_AS(synthesize_circuit(ObliviousLayout{4, 4, 4, 16}, 1000), resource_error);
}

TEST_CASE("layout validation") {
    ObliviousLayout no_sellers{0, 1, 1, 16};
    CHECK_THROWS_AS(no_sellers.validate(), layout_error);
    ObliviousLayout too_wide{1, 1, 1, 64};
    CHECK_THROWS_AS(too_wide.validate(), layout_error);
    ObliviousLayout ok{1, 1, 1, 16};
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.ext_bits() == 17);
    ObliviousLayout seven_slots{1, 1, 7, 16};
    CHECK(seven_slots.ext_bits() == 19);
}
