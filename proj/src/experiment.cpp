#include "ncma/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ncma {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for '" + key + "': " + v);
    }
}

unsigned long parse_uint(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long u = std::stoul(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for '" + key + "': " + v);
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: bad boolean for '" + key + "': " + v);
}

}  // namespace

nlohmann::json ExperimentSpec::to_json() const {
    nlohmann::json j;
    auto vnames = nlohmann::json::array();
    for (auto v : variants) vnames.push_back(variant_name(v));
    j["variants"] = vnames;
    j["snr_a"] = snr_a;
    j["snr_b"] = snr_b;
    j["l_b"] = l_b;
    j["l_a"] = l_a;
    j["l_a_ratio"] = l_a_ratio;
    j["reps"] = reps;
    j["n_beacons"] = n_beacons;
    j["slots_per_poll"] = slots_per_poll;
    j["k_symbols"] = k_symbols;
    j["gf_bits"] = gf_bits;
    j["alpha"] = alpha;
    j["model"] = channel_model_name(model);
    j["block_len"] = block_len;
    j["sigma2"] = sigma2;
    j["noiseless"] = noiseless;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    return j;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(line_no) +
                                     " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config: empty key on line " +
                                     std::to_string(line_no));
        kv[key] = val;
    }
    return kv;
}

ExperimentSpec spec_from_kv(const std::map<std::string, std::string>& kv) {
    ExperimentSpec spec;
    for (const auto& [key, val] : kv) {
        if (key == "variant") {
            spec.variants.clear();
            for (const auto& v : split_list(val))
                spec.variants.push_back(parse_variant(v));
        } else if (key == "snr_a") {
            spec.snr_a.clear();
            for (const auto& v : split_list(val))
                spec.snr_a.push_back(parse_double(key, v));
        } else if (key == "snr_b") {
            spec.snr_b.clear();
            if (val != "match")
                for (const auto& v : split_list(val))
                    spec.snr_b.push_back(parse_double(key, v));
        } else if (key == "l_b") {
            spec.l_b.clear();
            for (const auto& v : split_list(val))
                spec.l_b.push_back(static_cast<unsigned>(parse_uint(key, v)));
        } else if (key == "l_a") {
            spec.l_a.clear();
            if (val != "match")
                for (const auto& v : split_list(val))
                    spec.l_a.push_back(static_cast<unsigned>(parse_uint(key, v)));
        } else if (key == "l_a_ratio") {
            spec.l_a_ratio = parse_double(key, val);
        } else if (key == "reps") {
            spec.reps = static_cast<unsigned>(parse_uint(key, val));
        } else if (key == "beacons") {
            spec.n_beacons = static_cast<unsigned>(parse_uint(key, val));
        } else if (key == "slots_per_poll") {
            spec.slots_per_poll = static_cast<unsigned>(parse_uint(key, val));
        } else if (key == "k") {
            spec.k_symbols = static_cast<unsigned>(parse_uint(key, val));
        } else if (key == "gf_bits") {
            spec.gf_bits = static_cast<unsigned>(parse_uint(key, val));
        } else if (key == "alpha") {
            spec.alpha = parse_double(key, val);
        } else if (key == "model") {
            spec.model = parse_channel_model(val);
        } else if (key == "block_len") {
            spec.block_len = static_cast<unsigned>(parse_uint(key, val));
        } else if (key == "sigma2") {
            spec.sigma2 = parse_double(key, val);
        } else if (key == "noiseless") {
            spec.noiseless = parse_bool(key, val);
        } else if (key == "seed") {
            spec.seed = parse_uint(key, val);
        } else if (key == "out_dir") {
            spec.out_dir = val;
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }

    if (spec.variants.empty()) throw std::invalid_argument("config: empty variant axis");
    if (spec.snr_a.empty()) throw std::invalid_argument("config: empty snr_a axis");
    if (spec.l_b.empty()) throw std::invalid_argument("config: empty l_b axis");
    if (spec.reps < 1) throw std::invalid_argument("config: reps must be >= 1");
    if (spec.l_a_ratio < 0.0)
        throw std::invalid_argument("config: l_a_ratio must be positive");
    if (spec.alpha < 0.2 || spec.alpha > 0.25)
        throw std::invalid_argument("config: alpha outside [0.2, 0.25]");
    return spec;
}

std::vector<SessionConfig> expand_points(const ExperimentSpec& spec) {
    std::vector<SessionConfig> points;
    auto push = [&](Variant v, double sa, double sb, unsigned la, unsigned lb) {
        SessionConfig cfg;
        cfg.variant = v;
        cfg.snr_a_db = sa;
        cfg.snr_b_db = sb;
        cfg.l_a = la;
        cfg.l_b = lb;
        cfg.k_symbols = spec.k_symbols;
        cfg.gf_bits = spec.gf_bits;
        cfg.n_beacons = spec.n_beacons;
        cfg.slots_per_poll = spec.slots_per_poll;
        cfg.model = spec.model;
        cfg.block_len = spec.block_len;
        cfg.alpha = spec.alpha;
        cfg.sigma2 = spec.sigma2;
        cfg.noiseless = spec.noiseless;
        cfg.seed = spec.seed;  // replaced per rep
        points.push_back(cfg);
    };

    for (Variant v : spec.variants)
        for (double sa : spec.snr_a) {
            const std::vector<double> sbs =
                spec.snr_b.empty() ? std::vector<double>{sa} : spec.snr_b;
            for (double sb : sbs)
                for (unsigned lb : spec.l_b) {
                    std::vector<unsigned> las;
                    if (spec.l_a_ratio > 0.0)
                        las = {static_cast<unsigned>(
                            std::lround(spec.l_a_ratio * lb))};
                    else if (spec.l_a.empty())
                        las = {lb};
                    else
                        las = spec.l_a;
                    for (unsigned la : las) push(v, sa, sb, la, lb);
                }
        }
    return points;
}

std::uint64_t rep_seed(const ExperimentSpec& spec, std::size_t point,
                       unsigned rep) {
    std::uint64_t h = spec.seed ^ 0x51ed270b7a03c944ULL;
    h ^= (point + 1) * 0x9E3779B97F4A7C15ULL;
    h ^= (static_cast<std::uint64_t>(rep) + 1) * 0xC2B2AE3D27D4EB4FULL;
    h *= 0xFF51AFD7ED558CCDULL;
    h ^= h >> 33;
    return h;
}

SweepResult run_sweep(const ExperimentSpec& spec, unsigned jobs) {
    const auto points = expand_points(spec);
    SweepResult res;
    res.rows.resize(points.size() * spec.reps);

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    const std::size_t total = res.rows.size();
    unsigned n_threads = jobs ? jobs : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = static_cast<unsigned>(
        std::min<std::size_t>(n_threads, std::max<std::size_t>(total, 1)));

    auto worker = [&] {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= total) return;
            const std::size_t point = task / spec.reps;
            const unsigned rep = static_cast<unsigned>(task % spec.reps);
            SweepRow& row = res.rows[task];
            row.point = point;
            row.rep = rep;
            row.cfg = points[point];
            row.cfg.seed = rep_seed(spec, point, rep);
            try {
                row.stats = run_session(row.cfg).stats;
            } catch (const std::exception& e) {
                row.error = e.what();
                std::lock_guard<std::mutex> lock(err_mu);
                res.errors.push_back("point " + std::to_string(point) + " rep " +
                                     std::to_string(rep) + ": " + e.what());
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return res;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct RowMetrics {
    std::array<double, kEventGroupCount> freqs;
    double th_a, th_b, th_total, bound;
};

RowMetrics metrics_of(const SessionStats& s) {
    return {s.group_freqs(), s.node_throughput(0), s.node_throughput(1),
            s.total_throughput(), s.bound()};
}

}  // namespace

std::string sweep_csv(const SweepResult& res) {
    std::ostringstream out;
    out << "config_hash,point,rep,variant,snr_a_db,snr_b_db,l_a,l_b,k,slots,"
           "seed,freq_ab,freq_axbx,freq_aorb,freq_x,freq_none,th_a,th_b,"
           "th_total,upper_bound,undetected,abandoned,error\n";

    auto emit = [&](const SweepRow& row, const std::string& rep_label,
                    const RowMetrics& m, unsigned long undetected,
                    unsigned long abandoned, const std::string& error) {
        out << config_hash(row.cfg) << ',' << row.point << ',' << rep_label << ','
            << variant_name(row.cfg.variant) << ',' << fmt(row.cfg.snr_a_db) << ','
            << fmt(row.cfg.snr_b_db) << ',' << row.cfg.l_a << ',' << row.cfg.l_b
            << ',' << row.cfg.k_symbols << ',' << row.cfg.total_slots() << ','
            << row.cfg.seed << ',';
        out << fmt(m.freqs[0]) << ',' << fmt(m.freqs[1]) << ',' << fmt(m.freqs[2])
            << ',' << fmt(m.freqs[3]) << ',' << fmt(m.freqs[4]) << ','
            << fmt(m.th_a) << ',' << fmt(m.th_b) << ',' << fmt(m.th_total) << ','
            << fmt(m.bound) << ',' << undetected << ',' << abandoned << ','
            << error << '\n';
    };

    std::size_t i = 0;
    while (i < res.rows.size()) {
        const std::size_t point = res.rows[i].point;
        std::vector<const SweepRow*> good;
        std::size_t j = i;
        for (; j < res.rows.size() && res.rows[j].point == point; ++j) {
            const SweepRow& row = res.rows[j];
            if (row.error.empty()) {
                emit(row, std::to_string(row.rep), metrics_of(row.stats),
                     row.stats.undetected, row.stats.abandoned_rounds, "");
                good.push_back(&row);
            } else {
                emit(row, std::to_string(row.rep), RowMetrics{{}, 0, 0, 0, 0}, 0,
                     0, row.error);
            }
        }
        if (!good.empty()) {
            // Aggregate rows: mean and standard error over the reps.
            auto agg = [&](auto field) {
                double mean = 0.0;
                for (auto* r : good) mean += field(metrics_of(r->stats));
                mean /= static_cast<double>(good.size());
                double var = 0.0;
                for (auto* r : good) {
                    const double d = field(metrics_of(r->stats)) - mean;
                    var += d * d;
                }
                const double se = good.size() > 1
                                      ? std::sqrt(var / (static_cast<double>(good.size()) *
                                                         (static_cast<double>(good.size()) - 1)))
                                      : 0.0;
                return std::pair<double, double>(mean, se);
            };
            RowMetrics mean{}, se{};
            for (unsigned g = 0; g < kEventGroupCount; ++g) {
                auto [m, s] = agg([g](const RowMetrics& x) { return x.freqs[g]; });
                mean.freqs[g] = m;
                se.freqs[g] = s;
            }
            std::tie(mean.th_a, se.th_a) = agg([](const RowMetrics& x) { return x.th_a; });
            std::tie(mean.th_b, se.th_b) = agg([](const RowMetrics& x) { return x.th_b; });
            std::tie(mean.th_total, se.th_total) =
                agg([](const RowMetrics& x) { return x.th_total; });
            std::tie(mean.bound, se.bound) = agg([](const RowMetrics& x) { return x.bound; });
            unsigned long undetected = 0, abandoned = 0;
            for (auto* r : good) {
                undetected += r->stats.undetected;
                abandoned += r->stats.abandoned_rounds;
            }
            emit(*good.front(), "mean", mean, undetected, abandoned, "");
            emit(*good.front(), "stderr", se, 0, 0, "");
        }
        i = j;
    }
    return out.str();
}

void write_sweep_outputs(const ExperimentSpec& spec, const SweepResult& res) {
    std::filesystem::create_directories(spec.out_dir);
    const auto csv_path = std::filesystem::path(spec.out_dir) / "sweep.csv";
    const auto json_path = std::filesystem::path(spec.out_dir) / "sweep.json";

    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    csv << sweep_csv(res);

    nlohmann::json sidecar;
    sidecar["spec"] = spec.to_json();
    {
        // Hash of the canonical spec dump, echoed in every CSV row via the
        // per-point config hash as well.
        const std::string dumped = sidecar["spec"].dump();
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : dumped) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        sidecar["spec_hash"] = buf;
    }
    auto pts = nlohmann::json::array();
    for (const auto& cfg : expand_points(spec)) pts.push_back(config_to_json(cfg));
    sidecar["points"] = pts;
    sidecar["errors"] = res.errors;
    sidecar["csv"] = "sweep.csv";

    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw std::runtime_error("cannot write " + json_path.string());
    js << sidecar.dump(2) << '\n';
}

}  // namespace ncma
