#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdsa/tdsa.hpp"

namespace sdsa::oblivious {

struct layout_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Public shape of one auction: all counts and widths are known to both
// parties; every group is padded to exactly group_slots buyer slots.
struct ObliviousLayout {
    uint32_t sellers = 0;      // M
    uint32_t groups = 0;       // T
    uint32_t group_slots = 0;  // R
    unsigned value_bits = 16;  // K

    uint32_t critical_span() const { return std::min(sellers, groups); }  // min(T, M)
    // working width: wide enough for virtual bids bid * j, j <= R
    unsigned ext_bits() const;
    // one slot per seller/buyer value pair, sellers first, then groups row-major
    size_t value_count() const { return 2 * (size_t(sellers) + size_t(groups) * group_slots); }
    size_t output_word_count() const;

    void validate() const;
    bool operator==(const ObliviousLayout&) const = default;
};

// Additive shares (mod 2^K) of one value, parties 1 (evaluator) and 2 (generator).
struct SlotShares {
    uint64_t share1 = 0;
    uint64_t share2 = 0;
};

struct SellerShares {
    SlotShares id, request;
};
struct BuyerShares {
    SlotShares id, bid;
};

struct SharedInputs {
    std::vector<SellerShares> sellers;                // M entries
    std::vector<std::vector<BuyerShares>> groups;     // T x R entries

    // canonical flattening used by the circuit input order and the wire format
    std::vector<uint64_t> flatten(int party) const;
    static SharedInputs from_plain(const ObliviousLayout& layout,
                                   const std::vector<tdsa::Seller>& sellers,
                                   const std::vector<std::vector<tdsa::Buyer>>& groups);
};

struct ObliviousResult {
    tdsa::AuctionOutcome outcome;
    std::string trace;  // one line per primitive op: "OP kind slotA slotB"
};

// Straight-line evaluation of the auction on shares; the trace depends only
// on the layout, never on the share values.
ObliviousResult oblivious_tdsa(const ObliviousLayout& layout, const SharedInputs& inputs);

// ---- step-level entry points (value path), used by unit and property tests

struct McAfeeFlags {
    std::vector<uint8_t> prefix;    // lambda: 1 while phi <= critical index
    std::vector<uint8_t> critical;  // delta: 1 exactly at the critical index
    uint64_t seller_price = 0;
    uint64_t group_price = 0;
    std::vector<uint8_t> seller_win;  // per sorted seller position, first m entries
};
McAfeeFlags mcafee_flags(const std::vector<uint64_t>& requests_asc,
                         const std::vector<uint64_t>& group_bids_desc, size_t m);

struct WashingFlags {
    uint8_t group_win = 0;
    std::vector<uint8_t> buyer_win;  // per slot, sorted by bid descending
    uint64_t winner_count = 0;
    uint64_t group_member_price = 0;
};
WashingFlags washing_flags(const std::vector<uint64_t>& virtual_bids_desc, uint64_t group_bid,
                           uint64_t group_price);

// Masked pricing and identity-ordered assembly: every flagged seller pays
// the seller clearing price, buyer slots arrive with their prices already
// masked, and null slots (id 0) are dropped after the id sort.
struct PricedSellerSlot {
    uint64_t id;
    uint8_t win;
};
struct PricedBuyerSlot {
    uint64_t id;
    uint64_t price;
};
tdsa::AuctionOutcome oblivious_pricing(const std::vector<PricedSellerSlot>& seller_slots,
                                       const std::vector<PricedBuyerSlot>& buyer_slots,
                                       uint64_t seller_price, uint64_t group_price);

struct SortTrace {
    std::vector<uint64_t> values;
    std::vector<std::pair<uint32_t, uint32_t>> compare_exchanges;  // network, in order
};
// Oblivious sort of plain values (padded internally to a power of two);
// direction false = ascending, true = descending. Stable.
SortTrace oblivious_sort(const std::vector<uint64_t>& values, bool descending);

// Batcher odd-even mergesort network for n a power of two.
std::vector<std::pair<uint32_t, uint32_t>> sorting_network(uint32_t n);

// Parse the canonical output words back into an outcome; null slots
// (id == 0) are dropped here, in the clear.
tdsa::AuctionOutcome assemble_outcome(const ObliviousLayout& layout,
                                      const std::vector<uint64_t>& words);

uint32_t next_pow2(uint32_t n);
unsigned ceil_log2(uint64_t n);

}  // namespace sdsa::oblivious
