#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "sdsa/harness.hpp"

namespace {

using sdsa::bench::BenchConfig;

void add_common_flags(CLI::App* app, BenchConfig& cfg, std::string& mode,
                      std::string& transport) {
    app->add_option("--buyers", cfg.buyers, "number of buyers N");
    app->add_option("--sellers", cfg.sellers, "number of sellers M");
    app->add_option("--bits", cfg.bits, "bid/request bit width K");
    app->add_option("--area", cfg.area, "side of the square deployment area (m)");
    app->add_option("--range", cfg.range, "interference range (m)");
    app->add_option("--qmax", cfg.request_max, "requests drawn from [1, qmax)");
    app->add_option("--bmax", cfg.bid_max, "bids drawn from [1, bmax)");
    app->add_option("--seed", cfg.seed, "PRNG seed");
    app->add_option("--mode", mode, "plain | secure | both");
    app->add_option("--transport", transport, "inproc | tcp");
    app->add_option("--reps", cfg.reps, "repetitions to average over");
    app->add_option("--paillier-bits", cfg.paillier_bits, "Paillier modulus bits (secure mode)");
    app->add_option("--kprime", cfg.rand_bits, "randomization field width K'");
}

void apply_mode(BenchConfig& cfg, const std::string& mode, const std::string& transport) {
    if (mode == "plain") cfg.mode = BenchConfig::Mode::Plain;
    else if (mode == "secure") cfg.mode = BenchConfig::Mode::Secure;
    else if (mode == "both") cfg.mode = BenchConfig::Mode::Both;
    else throw CLI::ValidationError("--mode must be plain, secure or both");
    if (transport == "inproc") cfg.transport = sdsa::proto::Transport::InProc;
    else if (transport == "tcp") cfg.transport = sdsa::proto::Transport::Tcp;
    else throw CLI::ValidationError("--transport must be inproc or tcp");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot open " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"secure double spectrum auction engine"};
    app.require_subcommand(0, 1);

    BenchConfig cfg;
    std::string mode = "plain", transport = "inproc", csv_path, out_path, in_path;
    add_common_flags(&app, cfg, mode, transport);
    app.add_option("--csv", csv_path, "write bench records to this CSV file");

    auto* gen = app.add_subcommand("gen", "generate an auction instance as JSON");
    BenchConfig gen_cfg;
    std::string gen_mode = "plain", gen_transport = "inproc", gen_out;
    add_common_flags(gen, gen_cfg, gen_mode, gen_transport);
    gen->add_option("--out", gen_out, "output path (default stdout)");

    auto* run = app.add_subcommand("run", "run one auction and print the outcome");
    BenchConfig run_cfg;
    std::string run_mode = "plain", run_transport = "inproc", run_in;
    add_common_flags(run, run_cfg, run_mode, run_transport);
    run->add_option("--in", run_in, "instance JSON (generated when omitted)");

    auto* probe = app.add_subcommand("probe", "probe truthfulness under bid deviations");
    BenchConfig probe_cfg;
    std::string probe_mode = "plain", probe_transport = "inproc", probe_in, participant;
    std::vector<uint64_t> deviations;
    add_common_flags(probe, probe_cfg, probe_mode, probe_transport);
    probe->add_option("--in", probe_in, "instance JSON (generated when omitted)");
    probe->add_option("--participant", participant, "seller:<id> or buyer:<id>")->required();
    probe->add_option("--deviations", deviations, "declared values to try");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            apply_mode(gen_cfg, gen_mode, gen_transport);
            sdsa::Rng rng(gen_cfg.seed);
            write_out(gen_out, sdsa::bench::generate_instance(gen_cfg, rng).to_json() + "\n");
            return 0;
        }
        if (run->parsed()) {
            apply_mode(run_cfg, run_mode, run_transport);
            sdsa::tdsa::AuctionInstance inst;
            if (!run_in.empty()) {
                inst = sdsa::tdsa::AuctionInstance::from_json(slurp(run_in));
            } else {
                sdsa::Rng rng(run_cfg.seed);
                inst = sdsa::bench::generate_instance(run_cfg, rng);
            }
            inst.validate(run_cfg.bits);
            if (run_cfg.mode == BenchConfig::Mode::Plain) {
                std::cout << sdsa::tdsa::run_tdsa(inst).to_json() << "\n";
            } else {
                auto res = sdsa::proto::run_session(inst, run_cfg.session(), run_cfg.transport,
                                                    run_cfg.seed);
                auto pinned = sdsa::tdsa::run_tdsa_pinned(inst, res.pinned_groups);
                if (!(pinned == res.outcome)) {
                    std::cerr << "secure/plain outcome mismatch\nsecure: "
                              << res.outcome.digest() << "\nplain:  " << pinned.digest() << "\n";
                    return 1;
                }
                std::cout << res.outcome.to_json() << "\n";
                std::cerr << "phase ms: " << res.phase1_ms << " / " << res.phase2_ms << " / "
                          << res.phase3_ms << ", bytes: " << res.submission_bytes << " / "
                          << res.phase2_bytes << " / " << res.phase3_bytes
                          << ", gates: " << res.gates << "\n";
            }
            return 0;
        }
        if (probe->parsed()) {
            apply_mode(probe_cfg, probe_mode, probe_transport);
            sdsa::tdsa::AuctionInstance inst;
            if (!probe_in.empty()) {
                inst = sdsa::tdsa::AuctionInstance::from_json(slurp(probe_in));
            } else {
                sdsa::Rng rng(probe_cfg.seed);
                inst = sdsa::bench::generate_instance(probe_cfg, rng);
            }
            auto colon = participant.find(':');
            if (colon == std::string::npos)
                throw CLI::ValidationError("--participant must be seller:<id> or buyer:<id>");
            bool is_seller = participant.substr(0, colon) == "seller";
            uint64_t pid = std::stoull(participant.substr(colon + 1));
            if (deviations.empty()) {
                uint64_t truth = 0;
                for (const auto& s : inst.sellers)
                    if (is_seller && s.id == pid) truth = s.request;
                for (const auto& b : inst.buyers)
                    if (!is_seller && b.id == pid) truth = b.bid;
                for (int64_t d = -5; d <= 5; d++)
                    if (int64_t(truth) + d >= 0) deviations.push_back(truth + d);
            }
            auto reports = sdsa::bench::truthfulness_probe(inst, is_seller, pid, deviations);
            std::cout << "declared,utility_truthful,utility_deviated,profitable\n";
            bool any = false;
            for (const auto& r : reports) {
                std::cout << r.deviated_value << ',' << r.utility_truthful << ','
                          << r.utility_deviated << ',' << (r.profitable ? "yes" : "no") << "\n";
                any = any || r.profitable;
            }
            if (any) std::cerr << "profitable deviation found\n";
            return any ? 2 : 0;
        }

        // default command: benchmark sweep at the given parameters
        apply_mode(cfg, mode, transport);
        auto rows = sdsa::bench::run_bench(cfg);
        write_out(csv_path, sdsa::bench::to_csv(rows));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
