#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "ncma/experiment.hpp"

using namespace ncma;

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

ExperimentSpec tiny_spec() {
    ExperimentSpec spec;
    spec.variants = {Variant::NcmaRmud};
    spec.snr_a = {10.0};
    spec.l_b = {2};
    spec.reps = 2;
    spec.n_beacons = 6;
    spec.slots_per_poll = 1;
    spec.k_symbols = 8;
    spec.noiseless = true;
    spec.seed = 99;
    return spec;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("config files parse comments, blanks and padding") {
    write_file("exp_cfg.ini",
               "# sweep setup\n"
               "snr_a = 4, 6 ,8\n"
               "\n"
               "variant= ncma-rmud , su # trailing comment\n"
               "  l_b =16\n"
               "reps = 2\n");
    const auto kv = read_config_file("exp_cfg.ini");
    std::remove("exp_cfg.ini");

    CHECK(kv.at("snr_a") == "4, 6 ,8");
    CHECK(kv.at("variant") == "ncma-rmud , su");
    CHECK(kv.at("l_b") == "16");
    CHECK(kv.size() == 4);

    write_file("exp_cfg.ini", "snr_a 4\n");
    CHECK_THROWS_WITH_AS(read_config_file("exp_cfg.ini"),
                         doctest::Contains("line 1"), std::runtime_error);
    write_file("exp_cfg.ini", " = 4\n");
    CHECK_THROWS_WITH_AS(read_config_file("exp_cfg.ini"),
                         doctest::Contains("empty key"), std::runtime_error);
    std::remove("exp_cfg.ini");
    CHECK_THROWS_AS(read_config_file("exp_cfg.ini"), std::runtime_error);
}

TEST_CASE("spec_from_kv checks keys, axes and ranges") {
    std::map<std::string, std::string> kv = {
        {"variant", "su,ncma-rmud"}, {"snr_a", "6,8"},   {"snr_b", "match"},
        {"l_b", "4,8"},              {"l_a", "match"},   {"reps", "5"},
        {"beacons", "250"},          {"k", "32"},        {"alpha", "0.24"},
        {"model", "rayleigh-block"}, {"block_len", "8"}, {"seed", "7"},
        {"noiseless", "no"},         {"out_dir", "results"}};
    const ExperimentSpec spec = spec_from_kv(kv);
    CHECK(spec.variants == std::vector<Variant>{Variant::Su, Variant::NcmaRmud});
    CHECK(spec.snr_a == std::vector<double>{6.0, 8.0});
    CHECK(spec.snr_b.empty());  // match
    CHECK(spec.l_b == std::vector<unsigned>{4, 8});
    CHECK(spec.l_a.empty());  // match
    CHECK(spec.reps == 5);
    CHECK(spec.n_beacons == 250);
    CHECK(spec.k_symbols == 32);
    CHECK(spec.alpha == 0.24);
    CHECK(spec.model == ChannelModel::RayleighBlock);
    CHECK(spec.out_dir == "results");

    SUBCASE("unknown key") {
        kv["snr_c"] = "1";
        CHECK_THROWS_WITH_AS(spec_from_kv(kv), doctest::Contains("snr_c"),
                             std::invalid_argument);
    }
    SUBCASE("empty axes") {
        kv["variant"] = "";
        CHECK_THROWS_AS(spec_from_kv(kv), std::invalid_argument);
    }
    SUBCASE("alpha out of the supported band") {
        kv["alpha"] = "0.19";
        CHECK_THROWS_AS(spec_from_kv(kv), std::invalid_argument);
        kv["alpha"] = "0.26";
        CHECK_THROWS_AS(spec_from_kv(kv), std::invalid_argument);
    }
    SUBCASE("malformed numbers") {
        kv["snr_a"] = "6,eight";
        CHECK_THROWS_AS(spec_from_kv(kv), std::invalid_argument);
        kv["snr_a"] = "6";
        kv["reps"] = "two";
        CHECK_THROWS_AS(spec_from_kv(kv), std::invalid_argument);
        kv["reps"] = "0";
        CHECK_THROWS_AS(spec_from_kv(kv), std::invalid_argument);
    }
    SUBCASE("bad boolean") {
        kv["noiseless"] = "maybe";
        CHECK_THROWS_AS(spec_from_kv(kv), std::invalid_argument);
    }
}

TEST_CASE("expand_points multiplies the axes with match semantics") {
    ExperimentSpec spec = tiny_spec();
    spec.variants = {Variant::Su, Variant::NcmaRmud};
    spec.snr_a = {6.0, 8.0};
    spec.l_b = {4, 8};

    SUBCASE("snr_b and l_a default to matching") {
        const auto pts = expand_points(spec);
        REQUIRE(pts.size() == 2 * 2 * 2);
        for (const auto& p : pts) {
            CHECK(p.snr_b_db == p.snr_a_db);
            CHECK(p.l_a == p.l_b);
        }
        CHECK(pts[0].variant == Variant::Su);
        CHECK(pts.back().variant == Variant::NcmaRmud);
        CHECK(pts[0].snr_a_db == 6.0);
        CHECK(pts[0].l_b == 4);
        CHECK(pts[1].l_b == 8);
    }
    SUBCASE("explicit snr_b and l_a lists multiply in") {
        spec.snr_b = {0.0, 3.0};
        spec.l_a = {2, 4, 6};
        const auto pts = expand_points(spec);
        CHECK(pts.size() == 2 * 2 * 2 * 2 * 3);
    }
    SUBCASE("a length ratio pins l_a to the rounded multiple") {
        spec.l_a_ratio = 1.5;
        const auto pts = expand_points(spec);
        REQUIRE(pts.size() == 8);
        for (const auto& p : pts)
            CHECK(p.l_a == (p.l_b == 4 ? 6u : 12u));
    }
}

TEST_CASE("rep seeds are deterministic and collision-free on a small grid") {
    const ExperimentSpec spec = tiny_spec();
    std::set<std::uint64_t> seen;
    for (std::size_t point = 0; point < 64; ++point)
        for (unsigned rep = 0; rep < 16; ++rep) {
            const std::uint64_t s = rep_seed(spec, point, rep);
            CHECK(s == rep_seed(spec, point, rep));
            CHECK(seen.insert(s).second);
        }

    ExperimentSpec other = spec;
    other.seed += 1;
    CHECK(rep_seed(other, 0, 0) != rep_seed(spec, 0, 0));
}

TEST_CASE("run_sweep fills ordered rows on worker threads") {
    ExperimentSpec spec = tiny_spec();
    spec.snr_a = {10.0, 12.0};
    spec.reps = 3;

    const SweepResult res = run_sweep(spec, 3);
    CHECK(res.ok());
    REQUIRE(res.rows.size() == 2 * 3);
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        const SweepRow& row = res.rows[i];
        CHECK(row.point == i / 3);
        CHECK(row.rep == i % 3);
        CHECK(row.cfg.seed == rep_seed(spec, row.point, row.rep));
        CHECK(row.error.empty());
        CHECK(row.stats.total_slots == spec.n_beacons);
        // Noiseless pair sessions always saturate.
        CHECK(row.stats.total_throughput() == doctest::Approx(2.0));
    }

    // Identical sweeps produce identical CSV bytes, whatever the pool size.
    CHECK(sweep_csv(run_sweep(spec, 1)) == sweep_csv(res));
}

TEST_CASE("sweep CSV carries per-rep rows plus mean and stderr rows") {
    ExperimentSpec spec = tiny_spec();
    spec.reps = 3;
    const SweepResult res = run_sweep(spec, 2);
    const std::string csv = sweep_csv(res);

    CHECK(count_lines(csv) == 1 + 1 * (3 + 2));  // header + reps + mean/stderr
    CHECK(csv.find(",mean,") != std::string::npos);
    CHECK(csv.find(",stderr,") != std::string::npos);
    CHECK(csv.rfind("config_hash,point,rep,variant,", 0) == 0);

    // The noiseless mean throughput is exactly 2 with zero spread.
    std::istringstream lines(csv);
    std::string line;
    bool saw_mean = false, saw_se = false;
    while (std::getline(lines, line)) {
        if (line.find(",mean,") != std::string::npos) {
            CHECK(line.find(",2,") != std::string::npos);
            saw_mean = true;
        }
        if (line.find(",stderr,") != std::string::npos) {
            saw_se = true;
        }
    }
    CHECK(saw_mean);
    CHECK(saw_se);
}

TEST_CASE("failing points surface as error rows, not crashes") {
    ExperimentSpec spec = tiny_spec();
    spec.k_symbols = 0;  // rejected by the session runner
    const SweepResult res = run_sweep(spec, 2);
    CHECK_FALSE(res.ok());
    CHECK(res.errors.size() == res.rows.size());
    for (const auto& row : res.rows) CHECK_FALSE(row.error.empty());
    const std::string csv = sweep_csv(res);
    CHECK(csv.find("k_symbols") != std::string::npos);
    CHECK(csv.find(",mean,") == std::string::npos);  // nothing to aggregate
}

TEST_CASE("write_sweep_outputs emits the CSV and its JSON sidecar") {
    ExperimentSpec spec = tiny_spec();
    spec.out_dir = "exp_out_test";
    const SweepResult res = run_sweep(spec, 2);
    write_sweep_outputs(spec, res);

    std::ifstream csv("exp_out_test/sweep.csv", std::ios::binary);
    REQUIRE(csv.good());
    std::ostringstream csv_text;
    csv_text << csv.rdbuf();
    CHECK(csv_text.str() == sweep_csv(res));

    std::ifstream js("exp_out_test/sweep.json");
    REQUIRE(js.good());
    nlohmann::json sidecar;
    js >> sidecar;
    CHECK(sidecar["spec"] == spec.to_json());
    CHECK(sidecar["spec_hash"].is_string());
    CHECK(sidecar["points"].size() == expand_points(spec).size());
    CHECK(sidecar["errors"].empty());
    CHECK(sidecar["csv"] == "sweep.csv");

    std::filesystem::remove_all("exp_out_test");
}
