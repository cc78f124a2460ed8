#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nlsgraph/cli.hpp"

namespace fs = std::filesystem;
using namespace nlsg;

namespace {

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "nlsgraph");
    std::vector<char*> argv;
    for (std::string& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("nlsgraph_cli_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& body) {
    const fs::path p = dir / name;
    std::ofstream(p) << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(bool(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(bool(in));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const char* kCubicDelta = R"({
  "graph": {"n_edges": 3, "edge_length": 20.0, "n_points": 1001},
  "model": {"mu": 1.0, "alpha": -1.0, "vertex": "delta"},
  "stationary": {"mass": 4.0}
})";

}  // namespace

TEST_CASE("csv_number: 17 significant digits, round trip") {
    for (double x : {1.0, -0.3333333333333333, 6.62607015e-34, 12345.6789}) {
        const std::string t = csv_number(x);
        CHECK(std::strtod(t.c_str(), nullptr) == x);
        CHECK(t.find('e') != std::string::npos);
    }
}

TEST_CASE("stationary: catalog rows, ordering, determinism") {
    const fs::path dir = fresh_dir("stationary");
    const fs::path cfg = write_config(dir, "cfg.json", kCubicDelta);
    CHECK(run({"stationary", "--config", cfg.string(), "--out", (dir / "a").string()}) == 0);
    auto rows = read_csv(dir / "a" / "states.csv");
    // Header plus the two admissible branches j = 0, 1 (m = 4 sits exactly at
    // the j = 1 branch minimum, which is still attained).
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == "j");
    CHECK(rows[1][0] == "0");
    CHECK(rows[2][0] == "1");
    const double e0 = std::strtod(rows[1][5].c_str(), nullptr);
    const double e1 = std::strtod(rows[2][5].c_str(), nullptr);
    CHECK(e0 < e1);  // the ground state is the 0-bump branch
    const double m_cf = std::strtod(rows[1][3].c_str(), nullptr);
    CHECK(m_cf == doctest::Approx(4.0).epsilon(1e-12));

    // Byte-identical rerun.
    CHECK(run({"stationary", "--config", cfg.string(), "--out", (dir / "b").string()}) == 0);
    CHECK(slurp(dir / "a" / "states.csv") == slurp(dir / "b" / "states.csv"));
}

TEST_CASE("stationary: kirchhoff gives the single symmetric state") {
    const fs::path dir = fresh_dir("kirchhoff");
    const fs::path cfg = write_config(dir, "cfg.json", R"({
      "graph": {"n_edges": 3, "edge_length": 20.0, "n_points": 1001},
      "model": {"mu": 1.0, "alpha": 0.0, "vertex": "kirchhoff"},
      "stationary": {"omega": 2.0}
    })");
    CHECK(run({"stationary", "--config", cfg.string(), "--out", (dir / "out").string()}) == 0);
    auto rows = read_csv(dir / "out" / "states.csv");
    REQUIRE(rows.size() == 2);
    CHECK(std::strtod(rows[1][2].c_str(), nullptr) == 0.0);  // a = 0
}

TEST_CASE("config validation failures exit with code 2") {
    const fs::path dir = fresh_dir("badcfg");
    // Unknown key.
    fs::path cfg = write_config(dir, "unknown.json", R"({
      "graph": {"n_edges": 3, "edge_length": 20.0, "n_points": 1001, "oops": 1},
      "model": {"mu": 1.0, "alpha": -1.0},
      "stationary": {"mass": 4.0}
    })");
    CHECK(run({"stationary", "--config", cfg.string(), "--out", (dir / "o1").string()}) == 2);
    // omega and mass together.
    cfg = write_config(dir, "both.json", R"({
      "graph": {"n_edges": 3, "edge_length": 20.0, "n_points": 1001},
      "model": {"mu": 1.0, "alpha": -1.0},
      "stationary": {"mass": 4.0, "omega": 1.0}
    })");
    CHECK(run({"stationary", "--config", cfg.string(), "--out", (dir / "o2").string()}) == 2);
    // Missing file.
    CHECK(run({"stationary", "--config", (dir / "nope.json").string(), "--out",
               (dir / "o3").string()}) == 2);
    // Explicit inadmissible branch.
    cfg = write_config(dir, "branch.json", R"({
      "graph": {"n_edges": 3, "edge_length": 20.0, "n_points": 1001},
      "model": {"mu": 1.0, "alpha": -1.0},
      "stationary": {"omega": 2.0, "j": 2}
    })");
    CHECK(run({"stationary", "--config", cfg.string(), "--out", (dir / "o4").string()}) == 2);
}

TEST_CASE("stability: verdicts and below-threshold skip rows") {
    const fs::path dir = fresh_dir("stability");
    const fs::path cfg = write_config(dir, "cfg.json", R"({
      "graph": {"n_edges": 3, "edge_length": 20.0, "n_points": 801},
      "model": {"mu": 1.0, "alpha": -1.0},
      "stability": {"omega_sweep": [0.05, 0.5, 2.0], "j": 0}
    })");
    CHECK(run({"stability", "--config", cfg.string(), "--out", (dir / "out").string()}) == 0);
    auto rows = read_csv(dir / "out" / "stability.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[1].back() == "skipped:below_threshold");
    CHECK(rows[2].back() == "stable");
    CHECK(rows[3].back() == "stable");
    CHECK(rows[2][1] == "1");  // Morse index
}

TEST_CASE("evolve: trace with orbit distance, snapshots, seed override") {
    const fs::path dir = fresh_dir("evolve");
    const fs::path cfg = write_config(dir, "cfg.json", R"({
      "graph": {"n_edges": 3, "edge_length": 12.0, "n_points": 301},
      "model": {"mu": 1.0, "alpha": -1.0},
      "evolve": {"dt": 0.01, "t_end": 0.1, "record_every": 2, "snapshot_stride": 2,
                 "initial": {"type": "standing_wave", "omega": 2.0}}
    })");
    CHECK(run({"evolve", "--config", cfg.string(), "--out", (dir / "out").string()}) == 0);
    auto rows = read_csv(dir / "out" / "trace.csv");
    REQUIRE(rows.size() > 3);
    CHECK(rows[0].back() == "orbit_distance");
    for (size_t k = 1; k < rows.size(); ++k)
        CHECK(std::strtod(rows[k].back().c_str(), nullptr) < 1e-2);
    CHECK(fs::exists(dir / "out" / "snap_0.000000.csv"));

    // --seed overrides the config seed: matching seeds give identical traces.
    const fs::path pcfg = write_config(dir, "pert.json", R"({
      "graph": {"n_edges": 3, "edge_length": 12.0, "n_points": 301},
      "model": {"mu": 1.0, "alpha": -1.0},
      "evolve": {"dt": 0.01, "t_end": 0.05,
                 "initial": {"type": "perturbed_standing_wave", "omega": 2.0,
                             "perturbation_size": 0.01, "seed": 7}}
    })");
    CHECK(run({"evolve", "--config", pcfg.string(), "--out", (dir / "s7").string()}) == 0);
    CHECK(run({"evolve", "--config", pcfg.string(), "--out", (dir / "s9").string(), "--seed",
               "9"}) == 0);
    CHECK(slurp(dir / "s7" / "trace.csv") != slurp(dir / "s9" / "trace.csv"));
    CHECK(run({"evolve", "--config", pcfg.string(), "--out", (dir / "s7b").string(), "--seed",
               "7"}) == 0);
    CHECK(slurp(dir / "s7" / "trace.csv") == slurp(dir / "s7b" / "trace.csv"));
}

TEST_CASE("evolve: blow-up signal exits with code 3") {
    const fs::path dir = fresh_dir("blowup");
    const fs::path cfg = write_config(dir, "cfg.json", R"({
      "graph": {"n_edges": 2, "edge_length": 10.0, "n_points": 401},
      "model": {"mu": 3.0, "alpha": 0.0, "vertex": "kirchhoff"},
      "evolve": {"dt": 0.001, "t_end": 0.05, "scheme": "strang", "blowup_threshold": 2.5,
                 "initial": {"type": "perturbed_standing_wave", "omega": 1.0,
                             "perturbation_size": 4.0, "seed": 1}}
    })");
    CHECK(run({"evolve", "--config", cfg.string(), "--out", (dir / "out").string()}) == 3);
}

TEST_CASE("sweep: fan-out directories and aggregated exit code") {
    const fs::path dir = fresh_dir("sweep");
    const fs::path cfg = write_config(dir, "cfg.json", kCubicDelta);
    CHECK(run({"stationary", "--config", cfg.string(), "--out", (dir / "ok").string(),
               "--sweep", "stationary.mass=4,5"}) == 0);
    CHECK(fs::exists(dir / "ok" / "stationary_mass=4" / "states.csv"));
    CHECK(fs::exists(dir / "ok" / "stationary_mass=5" / "states.csv"));
    auto r4 = read_csv(dir / "ok" / "stationary_mass=4" / "states.csv");
    auto r5 = read_csv(dir / "ok" / "stationary_mass=5" / "states.csv");
    CHECK(std::strtod(r5[1][1].c_str(), nullptr) > std::strtod(r4[1][1].c_str(), nullptr));

    // One failing point dominates the aggregate exit code.
    CHECK(run({"stationary", "--config", cfg.string(), "--out", (dir / "mixed").string(),
               "--sweep", "stationary.mass=4,-1"}) == 2);
    CHECK(fs::exists(dir / "mixed" / "stationary_mass=4" / "states.csv"));
}

TEST_CASE("scatter: summary row with linear coefficients") {
    const fs::path dir = fresh_dir("scatter");
    const fs::path cfg = write_config(dir, "cfg.json", R"({
      "graph": {"n_edges": 3, "edge_length": 40.0, "n_points": 801},
      "model": {"mu": 1.0, "alpha": 0.0, "vertex": "kirchhoff"},
      "scatter": {"v": 10.0, "x0": 15.0, "delta_exp": 0.5, "T_log": 0.2, "record_every": 200}
    })");
    CHECK(run({"scatter", "--config", cfg.string(), "--out", (dir / "out").string()}) == 0);
    auto rows = read_csv(dir / "out" / "scatter.csv");
    REQUIRE(rows.size() > 4);
    // Summary block after the blank separator: header then one row.
    size_t blank = 0;
    for (size_t k = 0; k < rows.size(); ++k)
        if (rows[k].empty() || (rows[k].size() == 1 && rows[k][0].empty())) blank = k;
    REQUIRE(blank > 0);
    REQUIRE(rows.size() == blank + 3);
    const auto& sh = rows[blank + 1];
    const auto& sv = rows[blank + 2];
    REQUIRE(sh.size() == sv.size());
    CHECK(sh[0] == "v");
    CHECK(std::strtod(sv[0].c_str(), nullptr) == 10.0);
    // Kirchhoff N=3: R = -1/3, T = 2/3 at any wavenumber.
    CHECK(std::strtod(sv[4].c_str(), nullptr) == doctest::Approx(-1.0 / 3.0));
    CHECK(std::strtod(sv[6].c_str(), nullptr) == doctest::Approx(2.0 / 3.0));
    CHECK(sv.back() == "0");  // boundary_contaminated
}
