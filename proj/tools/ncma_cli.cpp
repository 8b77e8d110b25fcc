// Command-line front end: sweep / run / replay / stats.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ncma/experiment.hpp"
#include "ncma/protocol.hpp"

namespace {

using namespace ncma;

void print_stats(const SessionStats& stats) {
    const auto f = stats.group_freqs();
    std::printf("slots          %lu\n", stats.total_slots);
    for (unsigned g = 0; g < kEventGroupCount; ++g)
        std::printf("  %-7s freq  %.4f  (%lu)\n",
                    group_name(static_cast<EventGroup>(g)), f[g],
                    stats.group_counts[g]);
    for (std::size_t n = 0; n < stats.node_names.size(); ++n)
        std::printf("throughput %-4s %.4f  (%lu packets)\n",
                    stats.node_names[n].c_str(), stats.node_throughput(n),
                    stats.node_packets[n]);
    std::printf("throughput     %.4f\n", stats.total_throughput());
    std::printf("upper bound    %.4f\n", stats.bound());
    std::printf("messages       %lu   undetected %lu   abandoned %lu\n",
                stats.messages_solved, stats.undetected,
                stats.abandoned_rounds);
}

int cmd_run(const SessionConfig& cfg, const std::string& trace_out,
            const std::string& json_out) {
    const SessionResult res = run_session(cfg);
    print_stats(res.stats);
    if (!trace_out.empty()) {
        res.trace.write(trace_out);
        std::printf("trace written to %s\n", trace_out.c_str());
    }
    if (!json_out.empty()) {
        std::ofstream out(json_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + json_out);
        nlohmann::json j;
        j["config"] = config_to_json(cfg);
        j["config_hash"] = config_hash(cfg);
        j["stats"] = res.stats.to_json();
        out << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_replay(const std::string& trace_path,
               const std::vector<std::string>& macs,
               const std::vector<unsigned>& las,
               const std::vector<unsigned>& lbs, const std::string& json_out) {
    const Trace trace = Trace::read(trace_path);
    std::vector<unsigned> la_list = las.empty() ? std::vector<unsigned>{0} : las;
    std::vector<unsigned> lb_list = lbs.empty() ? std::vector<unsigned>{0} : lbs;

    nlohmann::json rows = nlohmann::json::array();
    std::printf("%-14s %6s %6s %10s %10s %10s %10s\n", "mac", "l_a", "l_b",
                "th_a", "th_b", "th_total", "bound");
    for (const auto& mac : macs)
        for (unsigned la : la_list)
            for (unsigned lb : lb_list) {
                ReplayOverrides ov;
                ov.mac = parse_mac_variant(mac);
                if (la) ov.l_a = la;
                if (lb) ov.l_b = lb;
                const SessionStats s = replay_trace(trace, ov);
                std::printf("%-14s %6s %6s %10.4f %10.4f %10.4f %10.4f\n",
                            mac.c_str(), la ? std::to_string(la).c_str() : "-",
                            lb ? std::to_string(lb).c_str() : "-",
                            s.node_throughput(0), s.node_throughput(1),
                            s.total_throughput(), s.bound());
                nlohmann::json row;
                row["mac"] = mac;
                row["l_a"] = la;
                row["l_b"] = lb;
                row["stats"] = s.to_json();
                rows.push_back(row);
            }
    if (!json_out.empty()) {
        std::ofstream out(json_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + json_out);
        nlohmann::json j;
        j["trace"] = trace_path;
        j["config_hash"] = trace.config_hash;
        j["rows"] = rows;
        out << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_stats(const std::string& trace_path) {
    const Trace trace = Trace::read(trace_path);
    std::array<unsigned long, kEventGroupCount> counts{};
    unsigned long bridged = 0, bad_genie = 0;
    for (const auto& r : trace.records) {
        ++counts[static_cast<int>(classify(r.mud, r.pnc))];
        bridged += r.bridged ? 1u : 0u;
        bad_genie += r.genie_ok ? 0u : 1u;
    }
    const double n = static_cast<double>(trace.records.size());
    std::printf("trace          %s\n", trace_path.c_str());
    std::printf("config hash    %s\n", trace.config_hash.c_str());
    std::printf("slots          %zu\n", trace.records.size());
    std::array<double, kEventGroupCount> freqs{};
    for (unsigned g = 0; g < kEventGroupCount; ++g) {
        freqs[g] = n > 0 ? static_cast<double>(counts[g]) / n : 0.0;
        std::printf("  %-7s freq  %.4f  (%lu)\n",
                    group_name(static_cast<EventGroup>(g)), freqs[g], counts[g]);
    }
    std::printf("bridged slots  %lu\n", bridged);
    std::printf("genie flags    %lu bad\n", bad_genie);
    if (n > 0) std::printf("upper bound    %.4f\n", upper_bound(freqs));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NCMA two-user random-access simulator"};
    app.require_subcommand(1);

    // ---- sweep ----------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "run a sweep from a config file");
    std::string sweep_config;
    unsigned jobs = 0;
    std::map<std::string, std::string> overrides;
    std::vector<std::string> override_kv;
    sweep->add_option("--config", sweep_config,
                      "config file (default: $NCMA_CONFIG)");
    sweep->add_option("--jobs", jobs, "worker threads (0 = auto)");
    sweep->add_option("--set", override_kv,
                      "override a config key, e.g. --set snr_a=6,8,10");
    std::string sweep_out;
    sweep->add_option("--out", sweep_out, "output directory (overrides out_dir)");

    // ---- run ------------------------------------------------------------
    auto* run = app.add_subcommand("run", "run a single session");
    SessionConfig run_cfg;
    std::string run_variant = "ncma-rmud", run_model = "fixed-phase";
    std::string trace_out, run_json;
    run->add_option("--snr-a", run_cfg.snr_a_db, "SNR of user A (dB)");
    run->add_option("--snr-b", run_cfg.snr_b_db, "SNR of user B (dB)");
    run->add_option("--la", run_cfg.l_a, "message length of user A (packets)");
    run->add_option("--lb", run_cfg.l_b, "message length of user B (packets)");
    run->add_option("--k", run_cfg.k_symbols, "packet payload size (bytes)");
    run->add_option("--beacons", run_cfg.n_beacons, "number of polls");
    run->add_option("--slots-per-poll", run_cfg.slots_per_poll,
                    "transmission slots per poll");
    run->add_option("--variant", run_variant,
                    "su|rmud|sic|ncma-rmud|ncma-sic|ncma-rmud-sic");
    run->add_option("--model", run_model, "fixed-phase|rayleigh-block");
    run->add_option("--block-len", run_cfg.block_len,
                    "gain block length (rayleigh-block)");
    run->add_option("--alpha", run_cfg.alpha, "quantizer scale");
    run->add_option("--seed", run_cfg.seed, "session seed");
    run->add_flag("--noiseless", run_cfg.noiseless, "disable channel noise");
    run->add_option("--trace-out", trace_out, "write the session trace here");
    run->add_option("--json-out", run_json, "write stats JSON here");

    // ---- replay ---------------------------------------------------------
    auto* replay = app.add_subcommand("replay", "re-decode a recorded trace");
    std::string replay_trace_path, replay_json;
    std::vector<std::string> replay_macs{"ncma", "mud-only", "su-projection"};
    std::vector<unsigned> replay_la, replay_lb;
    replay->add_option("--trace", replay_trace_path, "trace file")->required();
    replay->add_option("--mac", replay_macs,
                       "MAC variants: ncma|mud-only|su-projection")
        ->delimiter(',');
    replay->add_option("--la", replay_la, "override L_A (list)")->delimiter(',');
    replay->add_option("--lb", replay_lb, "override L_B (list)")->delimiter(',');
    replay->add_option("--json-out", replay_json, "write results JSON here");

    // ---- stats ----------------------------------------------------------
    auto* stats = app.add_subcommand("stats", "summarize a recorded trace");
    std::string stats_trace;
    stats->add_option("--trace", stats_trace, "trace file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            if (sweep_config.empty()) {
                if (const char* env = std::getenv("NCMA_CONFIG")) sweep_config = env;
            }
            std::map<std::string, std::string> kv;
            if (!sweep_config.empty()) kv = ncma::read_config_file(sweep_config);
            for (const auto& kvs : override_kv) {
                const auto eq = kvs.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("--set expects key=value: " + kvs);
                kv[kvs.substr(0, eq)] = kvs.substr(eq + 1);
            }
            ncma::ExperimentSpec spec = ncma::spec_from_kv(kv);
            if (!sweep_out.empty()) spec.out_dir = sweep_out;
            const ncma::SweepResult res = ncma::run_sweep(spec, jobs);
            ncma::write_sweep_outputs(spec, res);
            std::printf("sweep: %zu rows -> %s/sweep.csv\n", res.rows.size(),
                        spec.out_dir.c_str());
            if (!res.ok()) {
                for (const auto& e : res.errors)
                    std::fprintf(stderr, "sweep error: %s\n", e.c_str());
                return 2;
            }
            return 0;
        }
        if (run->parsed()) {
            run_cfg.variant = ncma::parse_variant(run_variant);
            run_cfg.model = ncma::parse_channel_model(run_model);
            return cmd_run(run_cfg, trace_out, run_json);
        }
        if (replay->parsed())
            return cmd_replay(replay_trace_path, replay_macs, replay_la,
                              replay_lb, replay_json);
        if (stats->parsed()) return cmd_stats(stats_trace);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
