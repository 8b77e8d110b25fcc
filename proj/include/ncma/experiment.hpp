#pragma once

#include <map>
#include <string>
#include <vector>

#include "ncma/protocol.hpp"

namespace ncma {

// A sweep description: the cross product of the axis lists below, each
// point run `reps` times with derived seeds.  snr_b/l_a empty means
// "match" (follow snr_a / l_b pointwise); l_a_ratio > 0 instead derives
// l_a = round(ratio * l_b).
struct ExperimentSpec {
    std::vector<Variant> variants{Variant::NcmaRmud};
    std::vector<double> snr_a{10.0};
    std::vector<double> snr_b;    // empty: match snr_a
    std::vector<unsigned> l_b{16};
    std::vector<unsigned> l_a;    // empty: match l_b (unless l_a_ratio set)
    double l_a_ratio = 0.0;
    unsigned reps = 3;

    unsigned n_beacons = 400;
    unsigned slots_per_poll = 3;
    unsigned k_symbols = 64;
    unsigned gf_bits = 8;
    double alpha = 0.228;
    ChannelModel model = ChannelModel::FixedPhase;
    unsigned block_len = 16;
    double sigma2 = 0.5;
    bool noiseless = false;
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    nlohmann::json to_json() const;
};

// Flat "key = value" file with '#' comments; list values are
// comma-separated.  Returns the raw pairs; unknown keys are rejected by
// spec_from_kv.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Builds a spec from key/value pairs (file contents and/or CLI overrides).
// Throws std::invalid_argument on unknown keys, bad values or empty axes.
ExperimentSpec spec_from_kv(const std::map<std::string, std::string>& kv);

// The expanded session configs, one per sweep point (rep seeds are derived
// inside run_sweep).
std::vector<SessionConfig> expand_points(const ExperimentSpec& spec);

std::uint64_t rep_seed(const ExperimentSpec& spec, std::size_t point,
                       unsigned rep);

struct SweepRow {
    std::size_t point = 0;
    unsigned rep = 0;
    SessionConfig cfg;
    SessionStats stats;
    std::string error;  // non-empty if the session failed
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by (point, rep)
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};

// Runs all (point, rep) sessions on a pool of `jobs` worker threads
// (0 = hardware concurrency).  Deterministic output ordering.
SweepResult run_sweep(const ExperimentSpec& spec, unsigned jobs = 0);

// Per-rep rows plus mean/stderr aggregate rows per point.
std::string sweep_csv(const SweepResult& res);

// Writes <out_dir>/sweep.csv and the config sidecar <out_dir>/sweep.json.
void write_sweep_outputs(const ExperimentSpec& spec, const SweepResult& res);

}  // namespace ncma
