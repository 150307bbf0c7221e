#include "sdsa/oblivious.hpp"


#include <cstring>

#include "auction_program.hpp"

namespace sdsa::oblivious {

uint32_t next_pow2(uint32_t n) {
    uint32_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

unsigned ceil_log2(uint64_t n) {
    unsigned e = 0;
    while ((uint64_t(1) << e) < n) e++;
    return e;
}

unsigned ObliviousLayout::ext_bits() const {
    return value_bits + ceil_log2(uint64_t(group_slots) + 1);
}

size_t ObliviousLayout::output_word_count() const {
    return 2 + 2 * size_t(next_pow2(std::max<uint32_t>(sellers, 1))) +
           2 * size_t(next_pow2(std::max<uint32_t>(groups * group_slots, 1)));
}

void ObliviousLayout::validate() const {
    if (sellers == 0 || groups == 0 || group_slots == 0)
        throw layout_error("layout counts must be positive");
    if (value_bits < 2 || value_bits > 32) throw layout_error("value width must be in [2,32]");
    // composite sort keys (value plus position tag) must fit one machine word
    unsigned tag_bits = std::max(ceil_log2(std::max<uint32_t>(next_pow2(group_slots), 2)),
                                 ceil_log2(std::max<uint32_t>(next_pow2(sellers), 2)));
    if (ext_bits() + tag_bits > 63) throw layout_error("working width exceeds 63 bits");
}

std::vector<std::pair<uint32_t, uint32_t>> sorting_network(uint32_t n) {
    if (n == 0 || (n & (n - 1)) != 0) throw layout_error("network size must be a power of two");
    std::vector<std::pair<uint32_t, uint32_t>> out;
    // Batcher odd-even mergesort
    auto merge = [&](auto&& self, uint32_t lo, uint32_t len, uint32_t r) -> void {
        uint32_t step = r * 2;
        if (step < len) {
            self(self, lo, len, step);
            self(self, lo + r, len, step);
            for (uint32_t i = lo + r; i + r < lo + len; i += step) out.push_back({i, i + r});
        } else {
            out.push_back({lo, lo + r});
        }
    };
    auto sort = [&](auto&& self, uint32_t lo, uint32_t len) -> void {
        if (len > 1) {
            uint32_t half = len / 2;
            self(self, lo, half);
            self(self, lo + half, half);
            merge(merge, lo, len, 1);
        }
    };
    sort(sort, 0, n);
    return out;
}

namespace {

uint64_t width_mask(unsigned bits) {
    return bits >= 64 ? ~uint64_t(0) : ((uint64_t(1) << bits) - 1);
}

// Executes the program on plain integers while recording the operand trace.
class ValueBackend {
public:
    struct Word {
        uint64_t v = 0;
        uint8_t bits = 0;
        uint32_t id = 0;
    };

    ValueBackend(std::vector<uint64_t> gen_vals, std::vector<uint64_t> eval_vals)
        : gen_(std::move(gen_vals)), eva_(std::move(eval_vals)) {
        trace_.reserve(1 << 20);
    }

    unsigned width(const Word& w) const { return w.bits; }

    Word gen_input(unsigned bits) {
        if (gen_pos_ >= gen_.size()) throw layout_error("generator input underrun");
        return fresh("IN", gen_[gen_pos_++] & width_mask(bits), bits, 0, 0);
    }
    Word eval_input(unsigned bits) {
        if (eva_pos_ >= eva_.size()) throw layout_error("evaluator input underrun");
        return fresh("IN", eva_[eva_pos_++] & width_mask(bits), bits, 1, 0);
    }
    Word constant(uint64_t v, unsigned bits) {
        return fresh("CONST", v & width_mask(bits), bits, bits, 0);
    }

    Word add(const Word& a, const Word& b) {
        same(a, b);
        return fresh("ADD", (a.v + b.v) & width_mask(a.bits), a.bits, a.id, b.id);
    }
    Word sub(const Word& a, const Word& b) {
        same(a, b);
        return fresh("SUB", (a.v - b.v) & width_mask(a.bits), a.bits, a.id, b.id);
    }
    Word band(const Word& a, const Word& b) {
        same(a, b);
        return fresh("AND", a.v & b.v, a.bits, a.id, b.id);
    }
    Word bor(const Word& a, const Word& b) {
        same(a, b);
        return fresh("OR", a.v | b.v, a.bits, a.id, b.id);
    }
    Word bxor(const Word& a, const Word& b) {
        same(a, b);
        return fresh("XOR", a.v ^ b.v, a.bits, a.id, b.id);
    }
    Word bnot(const Word& a) { return fresh("NOT", ~a.v & width_mask(a.bits), a.bits, a.id, 0); }
    Word mask(const Word& flag, const Word& a) {
        if (flag.bits != 1) throw layout_error("mask flag must be one bit");
        return fresh("MASK", flag.v ? a.v : 0, a.bits, flag.id, a.id);
    }
    Word gt(const Word& a, const Word& b) {
        same(a, b);
        return fresh("GT", a.v > b.v ? 1 : 0, 1, a.id, b.id);
    }
    Word ge(const Word& a, const Word& b) {
        same(a, b);
        return fresh("GE", a.v >= b.v ? 1 : 0, 1, a.id, b.id);
    }
    Word eq(const Word& a, const Word& b) {
        same(a, b);
        return fresh("EQ", a.v == b.v ? 1 : 0, 1, a.id, b.id);
    }
    Word ne(const Word& a, const Word& b) {
        same(a, b);
        return fresh("NE", a.v != b.v ? 1 : 0, 1, a.id, b.id);
    }
    Word shl(const Word& a, unsigned k) {
        return fresh("SHL", (a.v << k) & width_mask(a.bits), a.bits, a.id, k);
    }
    Word zext(const Word& a, unsigned bits) {
        if (bits < a.bits) throw layout_error("zext must not narrow");
        return fresh("ZEXT", a.v, bits, a.id, bits);
    }
    Word trunc(const Word& a, unsigned bits) {
        return fresh("TRUNC", a.v & width_mask(bits), bits, a.id, bits);
    }
    Word bit(const Word& a, unsigned i) { return fresh("BIT", (a.v >> i) & 1, 1, a.id, i); }
    Word concat(const Word& hi, const Word& lo) {
        return fresh("CAT", (hi.v << lo.bits) | lo.v, hi.bits + lo.bits, hi.id, lo.id);
    }
    Word pack(const std::vector<Word>& bits) {
        uint64_t v = 0;
        uint32_t first = bits.empty() ? 0 : bits[0].id;
        for (size_t i = 0; i < bits.size(); i++) {
            if (bits[i].bits != 1) throw layout_error("pack expects single-bit words");
            v |= bits[i].v << i;
            record("PACK", bits[i].id, uint32_t(i));
        }
        return fresh("CAT", v, unsigned(bits.size()), first, uint32_t(bits.size()));
    }
    void output(const Word& a) {
        record("OUT", a.id, 0);
        outputs_.push_back(a.v);
    }

    const std::vector<uint64_t>& outputs() const { return outputs_; }
    std::string take_trace() { return std::move(trace_); }

private:
    void same(const Word& a, const Word& b) const {
        if (a.bits != b.bits) throw layout_error("operand width mismatch");
    }
    void record(const char* op, uint32_t a, uint32_t b) {
        char buf[96];
        int n = snprintf(buf, sizeof buf, "OP %s %u %u\n", op, a, b);
        trace_.append(buf, size_t(n));
    }
    Word fresh(const char* op, uint64_t v, unsigned bits, uint32_t a, uint32_t b) {
        record(op, a, b);
        return Word{v, uint8_t(bits), next_id_++};
    }

    std::vector<uint64_t> gen_, eva_;
    size_t gen_pos_ = 0, eva_pos_ = 0;
    std::vector<uint64_t> outputs_;
    std::string trace_;
    uint32_t next_id_ = 1;
};

}  // namespace

std::vector<uint64_t> SharedInputs::flatten(int party) const {
    std::vector<uint64_t> out;
    for (const SellerShares& s : sellers) {
        out.push_back(party == 1 ? s.id.share1 : s.id.share2);
        out.push_back(party == 1 ? s.request.share1 : s.request.share2);
    }
    for (const auto& grp : groups)
        for (const BuyerShares& b : grp) {
            out.push_back(party == 1 ? b.id.share1 : b.id.share2);
            out.push_back(party == 1 ? b.bid.share1 : b.bid.share2);
        }
    return out;
}

SharedInputs SharedInputs::from_plain(const ObliviousLayout& layout,
                                      const std::vector<tdsa::Seller>& sellers,
                                      const std::vector<std::vector<tdsa::Buyer>>& groups) {
    if (sellers.size() != layout.sellers || groups.size() != layout.groups)
        throw layout_error("plain inputs do not match the layout");
    SharedInputs in;
    for (const tdsa::Seller& s : sellers)
        in.sellers.push_back({{s.id, 0}, {s.request, 0}});
    for (const auto& grp : groups) {
        if (grp.size() > layout.group_slots) throw layout_error("group exceeds padded size");
        std::vector<BuyerShares> row;
        for (const tdsa::Buyer& b : grp) row.push_back({{b.id, 0}, {b.bid, 0}});
        while (row.size() < layout.group_slots) row.push_back({{0, 0}, {0, 0}});
        in.groups.push_back(std::move(row));
    }
    return in;
}

ObliviousResult oblivious_tdsa(const ObliviousLayout& layout, const SharedInputs& inputs) {
    if (inputs.sellers.size() != layout.sellers || inputs.groups.size() != layout.groups)
        throw layout_error("inputs do not match the layout");
    for (const auto& g : inputs.groups)
        if (g.size() != layout.group_slots) throw layout_error("group not padded to layout size");

    ValueBackend bk(inputs.flatten(2), inputs.flatten(1));
    detail::auction_program(bk, layout);
    ObliviousResult res;
    res.outcome = assemble_outcome(layout, bk.outputs());
    res.trace = bk.take_trace();
    return res;
}

McAfeeFlags mcafee_flags(const std::vector<uint64_t>& requests_asc,
                         const std::vector<uint64_t>& group_bids_desc, size_t m) {
    if (m == 0 || requests_asc.size() < m || group_bids_desc.size() < m)
        throw layout_error("m exceeds the sorted input sizes");
    McAfeeFlags f;
    f.prefix.assign(m, 0);
    f.critical.assign(m, 0);
    for (size_t phi = 0; phi < m; phi++) {
        bool e = group_bids_desc[phi] >= requests_asc[phi];
        if (phi >= 1) e = e && group_bids_desc[phi] != group_bids_desc[phi - 1];
        f.prefix[phi] = e;
    }
    f.critical[m - 1] = f.prefix[m - 1];
    f.seller_price = f.critical[m - 1] ? requests_asc[m - 1] : 0;
    f.group_price = f.critical[m - 1] ? group_bids_desc[m - 1] : 0;
    for (size_t phi = m - 1; phi-- > 0;) {
        f.prefix[phi] = f.prefix[phi] | f.prefix[phi + 1];
        f.critical[phi] = f.prefix[phi] ^ f.prefix[phi + 1];
        if (f.critical[phi]) {
            f.seller_price += requests_asc[phi];
            f.group_price += group_bids_desc[phi];
        }
    }
    f.seller_win.assign(m, 0);
    for (size_t phi = 0; phi + 1 < m; phi++) f.seller_win[phi] = f.prefix[phi + 1];
    return f;
}

WashingFlags washing_flags(const std::vector<uint64_t>& virtual_bids_desc, uint64_t group_bid,
                           uint64_t group_price) {
    if (virtual_bids_desc.empty()) throw layout_error("no buyer slots");
    const size_t r = virtual_bids_desc.size();
    WashingFlags w;
    w.group_win = group_bid > group_price;
    w.buyer_win.assign(r, 0);
    w.buyer_win[r - 1] = w.group_win && virtual_bids_desc[r - 1] > group_price;
    for (size_t j = r - 1; j-- > 0;)
        w.buyer_win[j] =
            w.group_win && (virtual_bids_desc[j] > group_price || w.buyer_win[j + 1]);
    for (size_t j = r; j-- > 0;)
        if (w.group_win && w.buyer_win[j]) {
            w.winner_count = std::max<uint64_t>(w.winner_count, j + 1);
        }
    if (w.group_win && w.winner_count > 0)
        w.group_member_price = group_price / w.winner_count;
    return w;
}

namespace {

// id-ascending network sort over (id, price) records, null slots first
std::vector<std::pair<uint64_t, uint64_t>> id_sort(
    std::vector<std::pair<uint64_t, uint64_t>> recs) {
    uint32_t n2 = next_pow2(std::max<uint32_t>(uint32_t(recs.size()), 1));
    recs.resize(n2, {0, 0});
    for (auto [i, j] : sorting_network(n2))
        if (recs[i].first > recs[j].first) std::swap(recs[i], recs[j]);
    return recs;
}

}  // namespace

tdsa::AuctionOutcome oblivious_pricing(const std::vector<PricedSellerSlot>& seller_slots,
                                       const std::vector<PricedBuyerSlot>& buyer_slots,
                                       uint64_t seller_price, uint64_t group_price) {
    tdsa::AuctionOutcome out;
    out.seller_clearing = seller_price;
    out.group_clearing = group_price;

    std::vector<std::pair<uint64_t, uint64_t>> srecs;
    for (const PricedSellerSlot& s : seller_slots)
        srecs.push_back({s.id, s.win ? seller_price : 0});  // flag mask
    for (const auto& [id, price] : id_sort(std::move(srecs)))
        if (id != 0) out.seller_prices.push_back({id, price});

    std::vector<std::pair<uint64_t, uint64_t>> brecs;
    for (const PricedBuyerSlot& b : buyer_slots) brecs.push_back({b.id, b.price});
    for (const auto& [id, price] : id_sort(std::move(brecs)))
        if (id != 0) out.buyer_prices.push_back({id, price});
    return out;
}

SortTrace oblivious_sort(const std::vector<uint64_t>& values, bool descending) {
    uint32_t n = uint32_t(values.size());
    uint32_t n2 = next_pow2(std::max<uint32_t>(n, 1));
    std::vector<std::pair<uint64_t, uint32_t>> slots;  // (value, position tag)
    for (uint32_t i = 0; i < n; i++) slots.push_back({values[i], i});
    for (uint32_t i = n; i < n2; i++)
        slots.push_back({descending ? 0 : ~uint64_t(0), i});  // sentinels sort last

    SortTrace tr;
    tr.compare_exchanges = sorting_network(n2);
    for (auto [i, j] : tr.compare_exchanges) {
        bool swap;
        if (descending)
            swap = slots[i].first < slots[j].first ||
                   (slots[i].first == slots[j].first && slots[i].second > slots[j].second);
        else
            swap = slots[i].first > slots[j].first ||
                   (slots[i].first == slots[j].first && slots[i].second > slots[j].second);
        if (swap) std::swap(slots[i], slots[j]);
    }
    for (uint32_t i = 0; i < n; i++) tr.values.push_back(slots[i].first);
    return tr;
}

tdsa::AuctionOutcome assemble_outcome(const ObliviousLayout& layout,
                                      const std::vector<uint64_t>& words) {
    if (words.size() != layout.output_word_count())
        throw layout_error("output word count does not match the layout");
    tdsa::AuctionOutcome out;
    size_t p = 0;
    out.seller_clearing = words[p++];
    out.group_clearing = words[p++];
    size_t m2 = next_pow2(std::max<uint32_t>(layout.sellers, 1));
    for (size_t i = 0; i < m2; i++) {
        uint64_t id = words[p++], price = words[p++];
        if (id != 0) out.seller_prices.push_back({id, price});
    }
    size_t b2 = next_pow2(std::max<uint32_t>(layout.groups * layout.group_slots, 1));
    for (size_t i = 0; i < b2; i++) {
        uint64_t id = words[p++], price = words[p++];
        if (id != 0) out.buyer_prices.push_back({id, price});
    }
    return out;
}

}  // namespace sdsa::oblivious
