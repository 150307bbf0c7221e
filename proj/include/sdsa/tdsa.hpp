#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdsa::tdsa {

struct instance_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Seller {
    uint64_t id;
    uint64_t request;
};

struct Buyer {
    uint64_t id;
    uint64_t bid;
    int64_t x, y;  // meters
};

struct AuctionInstance {
    std::vector<Seller> sellers;
    std::vector<Buyer> buyers;
    uint64_t interference_range = 500;

    // ids unique per side and >= 1; requests/bids/ids fit value_bits
    void validate(unsigned value_bits) const;

    std::string to_json() const;
    static AuctionInstance from_json(const std::string& text);
};

// Symmetric irreflexive adjacency over buyer indices.
class ConflictGraph {
public:
    explicit ConflictGraph(size_t n) : n_(n), adj_(n * n, 0) {}
    size_t size() const { return n_; }
    bool edge(size_t i, size_t j) const { return adj_[i * n_ + j] != 0; }
    void add_edge(size_t i, size_t j) {
        if (i == j) return;
        adj_[i * n_ + j] = adj_[j * n_ + i] = 1;
    }
    size_t degree(size_t i) const;

private:
    size_t n_;
    std::vector<uint8_t> adj_;
};

// Disjoint independent sets covering all buyers; members kept in ascending
// index order, groups in color order.
struct GroupSet {
    std::vector<std::vector<uint32_t>> groups;
    size_t max_group_size() const;
};

struct PriceEntry {
    uint64_t id;
    uint64_t price;
    bool operator==(const PriceEntry&) const = default;
};

struct AuctionOutcome {
    uint64_t seller_clearing = 0;              // price paid to each winning seller
    uint64_t group_clearing = 0;               // price charged to each winning group
    std::vector<PriceEntry> seller_prices;     // all sellers, ascending id, losers 0
    std::vector<PriceEntry> buyer_prices;      // all buyers, ascending id, losers 0

    bool operator==(const AuctionOutcome&) const = default;
    std::vector<uint8_t> serialize() const;
    static AuctionOutcome deserialize(const std::vector<uint8_t>& bytes);
    std::string to_json() const;
    std::string digest() const;  // hex SHA-256 of the serialized form
};

ConflictGraph build_conflict_graph(const AuctionInstance& instance);

// Greedy coloring in canonical order (degree descending, index ascending);
// depends only on the graph, never on bids.
GroupSet form_groups(const ConflictGraph& graph);

struct GroupBid {
    uint64_t group_bid = 0;
    std::vector<uint64_t> virtual_bids;  // virtual_bids[j-1] = j-th largest bid * j
};
// bids must already be sorted non-ascending
GroupBid group_bid(const std::vector<uint64_t>& bids_desc);

struct McAfeeResult {
    size_t critical_index = 0;  // 0 when no profitable index exists
    uint64_t seller_price = 0;
    uint64_t group_price = 0;
    std::vector<uint8_t> seller_win;  // flags on sorted seller positions
    std::vector<uint8_t> group_win;   // flags on sorted group positions
};
McAfeeResult mcafee_determine(const std::vector<uint64_t>& requests_asc,
                              const std::vector<uint64_t>& group_bids_desc);

struct WashResult {
    size_t winner_count = 0;          // C_t
    std::vector<uint8_t> survivor;    // flags per sorted position
    uint64_t per_buyer_price = 0;     // floor(P^g / C_t), 0 when C_t = 0
};
// bids sorted non-ascending; yields no survivors when nothing clears the price
WashResult wash_out(const std::vector<uint64_t>& bids_desc, uint64_t group_price);

AuctionOutcome run_tdsa(const AuctionInstance& instance);
// Same mechanism with the buyer grouping supplied by the caller.
AuctionOutcome run_tdsa_pinned(const AuctionInstance& instance, const GroupSet& groups);

}  // namespace sdsa::tdsa
