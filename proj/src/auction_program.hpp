#pragma once

// Straight-line auction program shared by the value backend (trace + plain
// result) and the circuit backend (gate synthesis). Everything here is a
// fixed function of the layout; values never steer control flow.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sdsa/oblivious.hpp"

namespace sdsa::oblivious::detail {

template <class B>
using WordT = typename B::Word;

template <class B>
WordT<B> mux(B& bk, const WordT<B>& sel, const WordT<B>& a, const WordT<B>& b) {
    return bk.bxor(b, bk.mask(sel, bk.bxor(a, b)));
}

template <class B>
WordT<B> max_word(B& bk, const WordT<B>& a, const WordT<B>& b) {
    return mux(bk, bk.gt(a, b), a, b);
}

template <class B>
WordT<B> mul_const(B& bk, const WordT<B>& a, uint64_t c) {
    WordT<B> acc = bk.constant(0, bk.width(a));
    for (unsigned k = 0; (c >> k) != 0; k++)
        if ((c >> k) & 1) acc = bk.add(acc, bk.shl(a, k));
    return acc;
}

// restoring division; quotient takes the dividend's width
template <class B>
WordT<B> divide(B& bk, const WordT<B>& dividend, const WordT<B>& divisor) {
    unsigned w = bk.width(dividend), d = bk.width(divisor);
    WordT<B> rem = bk.constant(0, d + 1);
    WordT<B> dvs = bk.zext(divisor, d + 1);
    std::vector<WordT<B>> qbits(w);
    for (unsigned i = w; i-- > 0;) {
        rem = bk.bor(bk.shl(rem, 1), bk.zext(bk.bit(dividend, i), d + 1));
        WordT<B> can = bk.ge(rem, dvs);
        rem = mux(bk, can, bk.sub(rem, dvs), rem);
        qbits[i] = can;
    }
    return bk.pack(qbits);
}

template <class B>
void cond_swap(B& bk, const WordT<B>& sel, WordT<B>& a, WordT<B>& b) {
    WordT<B> d = bk.mask(sel, bk.bxor(a, b));
    a = bk.bxor(a, d);
    b = bk.bxor(b, d);
}

// Compare-exchange network sort over records of words. The key function maps
// a record to a word compared ascending; ties never reorder when the key
// embeds a distinct position tag.
template <class B, class KeyFn>
void network_sort(B& bk, std::vector<std::vector<WordT<B>>>& recs, KeyFn key) {
    for (auto [i, j] : sorting_network(uint32_t(recs.size()))) {
        WordT<B> swap = bk.gt(key(bk, recs[i]), key(bk, recs[j]));
        for (size_t f = 0; f < recs[i].size(); f++) cond_swap(bk, swap, recs[i][f], recs[j][f]);
    }
}

// The full data-oblivious auction. Inputs and outputs flow through the
// backend; see ObliviousLayout for the canonical orders.
template <class B>
void auction_program(B& bk, const ObliviousLayout& L) {
    L.validate();
    const uint32_t M = L.sellers, T = L.groups, R = L.group_slots;
    const unsigned K = L.value_bits, W = L.ext_bits();
    const uint32_t m = L.critical_span();
    using Word = WordT<B>;
    using Rec = std::vector<Word>;

    // ---- inputs and share reconstruction (x1 + x2 mod 2^K)
    const size_t nvals = L.value_count();
    std::vector<Word> gen(nvals), eva(nvals);
    for (auto& w : gen) w = bk.gen_input(K);
    for (auto& w : eva) w = bk.eval_input(K);
    std::vector<Word> val(nvals);
    for (size_t i = 0; i < nvals; i++) val[i] = bk.zext(bk.add(gen[i], eva[i]), W);

    auto seller_id = [&](uint32_t i) { return val[2 * i]; };
    auto seller_request = [&](uint32_t i) { return val[2 * i + 1]; };
    auto buyer_id = [&](uint32_t t, uint32_t j) { return val[2 * M + 2 * (size_t(t) * R + j)]; };
    auto buyer_bid = [&](uint32_t t, uint32_t j) {
        return val[2 * M + 2 * (size_t(t) * R + j) + 1];
    };

    const Word zero_w = bk.constant(0, W);
    const Word zero_flag = bk.constant(0, 1);

    // ---- virtual group bidding: per-group bid-descending sort (stable via
    // position tags), virtual bids bid*j, group bid = max virtual bid
    const uint32_t r2 = next_pow2(std::max<uint32_t>(R, 1));
    const unsigned gpos_bits = ceil_log2(std::max<uint32_t>(r2, 2));
    std::vector<std::vector<Rec>> gslot(T);  // [t][j] = {id, bid} after sorting
    std::vector<std::vector<Word>> vbid(T);  // [t][j]
    std::vector<Word> gbid(T);
    for (uint32_t t = 0; t < T; t++) {
        std::vector<Rec> recs;
        for (uint32_t j = 0; j < r2; j++) {
            Word id = j < R ? buyer_id(t, j) : zero_w;
            Word b = j < R ? buyer_bid(t, j) : zero_w;
            recs.push_back({id, b, bk.constant(j, gpos_bits)});
        }
        network_sort(bk, recs, [](B& k, const Rec& r) {
            return k.concat(k.bnot(r[1]), r[2]);  // bid descending, stable
        });
        recs.resize(R);
        gbid[t] = zero_w;
        vbid[t].resize(R);
        for (uint32_t j = 0; j < R; j++) {
            vbid[t][j] = mul_const(bk, recs[j][1], j + 1);
            gbid[t] = max_word(bk, gbid[t], vbid[t][j]);
        }
        gslot[t] = std::move(recs);
    }

    // ---- preliminary winner determination (McAfee with flag arrays)
    const uint32_t m2 = next_pow2(std::max<uint32_t>(M, 1));
    const unsigned spos_bits = ceil_log2(std::max<uint32_t>(m2, 2));
    std::vector<Rec> sellers;
    const Word q_pad = bk.constant(0, W);  // replaced below by all-ones
    Word all_ones = bk.bnot(q_pad);
    for (uint32_t i = 0; i < m2; i++) {
        Word id = i < M ? seller_id(i) : zero_w;
        Word q = i < M ? seller_request(i) : all_ones;
        sellers.push_back({id, q, bk.constant(i, spos_bits)});
    }
    network_sort(bk, sellers, [](B& k, const Rec& r) {
        return k.concat(r[1], r[2]);  // request ascending, stable
    });

    const uint32_t t2 = next_pow2(std::max<uint32_t>(T, 1));
    std::vector<Rec> gbrec;
    for (uint32_t t = 0; t < t2; t++) gbrec.push_back({t < T ? gbid[t] : zero_w});
    // group bids are sorted as bare values; ties carry equal values, so the
    // unstable order cannot change anything downstream
    network_sort(bk, gbrec,
                 [](B& k, const Rec& r) { return k.bnot(r[0]); });  // descending

    std::vector<Word> lam(m), crit(m);
    for (uint32_t phi = 0; phi < m; phi++) {
        Word e = bk.ge(gbrec[phi][0], sellers[phi][1]);
        if (phi >= 1) e = bk.band(e, bk.ne(gbrec[phi][0], gbrec[phi - 1][0]));
        lam[phi] = e;
    }
    crit[m - 1] = lam[m - 1];
    Word seller_price = bk.mask(crit[m - 1], sellers[m - 1][1]);
    Word group_price = bk.mask(crit[m - 1], gbrec[m - 1][0]);
    for (uint32_t phi = m - 1; phi-- > 0;) {
        lam[phi] = bk.bor(lam[phi], lam[phi + 1]);
        crit[phi] = bk.bxor(lam[phi], lam[phi + 1]);
        seller_price = bk.add(seller_price, bk.mask(crit[phi], sellers[phi][1]));
        group_price = bk.add(group_price, bk.mask(crit[phi], gbrec[phi][0]));
    }
    std::vector<Word> seller_win(m2, zero_flag);
    for (uint32_t phi = 0; phi + 1 < m; phi++) seller_win[phi] = lam[phi + 1];

    // ---- washing out within every group
    const unsigned ct_bits = ceil_log2(uint64_t(R) + 1);
    std::vector<std::vector<Word>> buyer_price(T, std::vector<Word>(R));
    for (uint32_t t = 0; t < T; t++) {
        Word wg = bk.gt(gbid[t], group_price);
        std::vector<Word> wb(R);
        wb[R - 1] = bk.band(wg, bk.gt(vbid[t][R - 1], group_price));
        for (uint32_t j = R - 1; j-- > 0;)
            wb[j] = bk.band(wg, bk.bor(bk.gt(vbid[t][j], group_price), wb[j + 1]));
        Word count = bk.constant(0, ct_bits);
        for (uint32_t j = R; j-- > 0;)
            count = max_word(bk, count,
                             bk.mask(bk.band(wg, wb[j]), bk.constant(j + 1, ct_bits)));
        Word member_price = bk.mask(wg, divide(bk, group_price, count));
        for (uint32_t j = 0; j < R; j++)
            buyer_price[t][j] = bk.mask(bk.band(wg, wb[j]), member_price);
    }

    // ---- pricing and identity-ordered output
    bk.output(seller_price);
    bk.output(group_price);

    std::vector<Rec> sout;
    for (uint32_t i = 0; i < m2; i++)
        sout.push_back({sellers[i][0], bk.mask(seller_win[i], seller_price)});
    network_sort(bk, sout, [](B&, const Rec& r) { return r[0]; });  // id ascending
    for (auto& r : sout) {
        bk.output(r[0]);
        bk.output(r[1]);
    }

    const uint32_t b2 = next_pow2(std::max<uint32_t>(T * R, 1));
    std::vector<Rec> bout;
    for (uint32_t t = 0; t < T; t++)
        for (uint32_t j = 0; j < R; j++) bout.push_back({gslot[t][j][0], buyer_price[t][j]});
    while (bout.size() < b2) bout.push_back({zero_w, zero_w});
    network_sort(bk, bout, [](B&, const Rec& r) { return r[0]; });
    for (auto& r : bout) {
        bk.output(r[0]);
        bk.output(r[1]);
    }
}

}  // namespace sdsa::oblivious::detail
