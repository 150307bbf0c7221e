#pragma once

#include "sdsa/protocol/parties.hpp"
#include "sdsa/tdsa.hpp"

namespace sdsa::bench {

struct bench_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BenchConfig {
    uint32_t buyers = 100;
    uint32_t sellers = 10;
    unsigned bits = 16;  // value field width K
    uint64_t area = 2000;
    uint64_t range = 500;
    uint64_t request_max = 151;  // requests drawn uniformly from [1, request_max)
    uint64_t bid_max = 51;       // bids drawn uniformly from [1, bid_max)
    uint64_t seed = 1;
    enum class Mode { Plain, Secure, Both } mode = Mode::Plain;
    proto::Transport transport = proto::Transport::InProc;
    uint32_t reps = 1;
    unsigned paillier_bits = 512;  // desk-scale secure mode
    unsigned rand_bits = 81;       // randomization field width K'
    bool fast_ot_group = true;

    void validate() const;
    proto::SessionConfig session() const;
};

tdsa::AuctionInstance generate_instance(const BenchConfig& cfg, Rng& rng);

struct BenchRecord {
    uint32_t n = 0, m = 0;
    unsigned bits = 0;
    std::string mode;
    std::string phase;
    double ms = 0;
    uint64_t bytes = 0;
    uint64_t gates = 0;
    std::string digest;
};

inline constexpr const char* kCsvHeader = "n,m,bits,mode,phase,ms,bytes,gates,digest";
std::string to_csv(const std::vector<BenchRecord>& rows);

// Per-rep rows plus one averaged row per (mode, phase); secure and plain
// outcomes are compared (grouping pinned) whenever both run.
std::vector<BenchRecord> run_bench(const BenchConfig& cfg);

// Empirical probe of the mechanism's truthfulness: rerun the plain auction
// with one participant's declared value changed and report utility deltas.
struct DeviationReport {
    bool is_seller = false;
    uint64_t participant_id = 0;
    uint64_t true_value = 0;
    uint64_t deviated_value = 0;
    int64_t utility_truthful = 0;
    int64_t utility_deviated = 0;
    bool profitable = false;  // strictly higher utility than truthful
};
std::vector<DeviationReport> truthfulness_probe(const tdsa::AuctionInstance& instance,
                                                bool is_seller, uint64_t participant_id,
                                                const std::vector<uint64_t>& deviations);

}  // namespace sdsa::bench
