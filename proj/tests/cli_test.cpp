#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "cli.hpp"
#include "tailinv/serialize.hpp"

using namespace tailinv;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("tailinv_cli_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(std::initializer_list<std::string> args) {
    std::vector<std::string> full{"tailinv"};
    full.insert(full.end(), args.begin(), args.end());
    return cli::run(full);
}

Json slurp_json(const std::string& path) {
    std::ifstream is(path);
    REQUIRE(is.good());
    return Json::parse(is);
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("check command reports refutations with exit code 0") {
    TempDir tmp;
    const std::string report = tmp.file("report.json");
    const int code = run_cli({"check", "--weights", "1,-1", "--alpha", "1", "--report", report});
    CHECK(code == 0);
    const Json j = slurp_json(report);
    CHECK(j["schema_version"] == 1);
    CHECK(j["verdict"]["status"] == "Refuted");
    CHECK(j["verdict"]["condition"] == "eq3.4");
    CHECK(j["verdict"]["witness_theta"][0] == doctest::Approx(0.0));
}

TEST_CASE("check command finds the pi/ln2 witness with a custom scan bound") {
    TempDir tmp;
    const std::string report = tmp.file("report.json");
    const int code =
        run_cli({"check", "--weights", "1,0.5,0.5", "--alpha", "1", "--theta-max", "6", "--report", report});
    CHECK(code == 0);
    const Json j = slurp_json(report);
    CHECK(j["verdict"]["status"] == "Refuted");
    CHECK(j["verdict"]["condition"] == "eq3.3");
    CHECK(j["verdict"]["witness_theta"][0].get<double>() ==
          doctest::Approx(std::numbers::pi / std::numbers::ln2).epsilon(1e-6));
}

TEST_CASE("bad arguments exit with code 1") {
    CHECK(run_cli({"check", "--alpha", "1"}) == 1);                       // no input source
    CHECK(run_cli({"check", "--weights", "abc", "--alpha", "1"}) == 1);   // unparsable list
    CHECK(run_cli({"nonsense"}) == 1);                                    // unknown command
    CHECK(run_cli({"invert", "--family", "/nonexistent.json", "--muX", "/x.json", "--set",
                   "/s.json"}) == 1);
}

TEST_CASE("forward then invert round trips through files") {
    TempDir tmp;
    const std::string muz = tmp.file("muz.json");
    const std::string fam = tmp.file("fam.json");
    const std::string mux = tmp.file("mux.json");
    const std::string set = tmp.file("set.json");
    const std::string report = tmp.file("invert.json");
    {
        std::ofstream(muz) << R"({"dim":2,"alpha":1,"spectral":[{"dir":[1,0],"w":1}]})";
        std::ofstream(fam) << R"({"kind":"diag","dim":2,"entries":[[1,1],[0.5,0.5]]})";
        std::ofstream(set) << R"({"variant":"half_line","signs":[1,0],"thresholds":[1,0]})";
    }
    CHECK(run_cli({"forward", "--muZ", muz, "--family", fam, "--out", mux}) == 0);
    const Json mux_json = slurp_json(mux);
    CHECK(mux_json["spectral"][0]["w"].get<double>() == doctest::Approx(1.5));

    CHECK(run_cli({"invert", "--family", fam, "--muX", mux, "--set", set, "--tol", "1e-10", "--report",
                   report}) == 0);
    const Json j = slurp_json(report);
    // truth: mu_Z of the half line at 1 with a unit atom on the axis = 1
    CHECK(j["result"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(j["result"]["tail_bound"].get<double>() <= 1e-10);
}

TEST_CASE("infeasible inversion exits with code 2") {
    TempDir tmp;
    const std::string fam = tmp.file("fam.json");
    const std::string mux = tmp.file("mux.json");
    const std::string set = tmp.file("set.json");
    {
        std::ofstream(fam) << R"({"kind":"diag","dim":1,"entries":[[1],[1]]})";
        std::ofstream(mux) << R"({"dim":1,"alpha":1,"spectral":[{"dir":[1],"w":2}]})";
        std::ofstream(set) << R"({"variant":"norm_exceed","dim":1,"radius":1})";
    }
    CHECK(run_cli({"invert", "--family", fam, "--muX", mux, "--set", set}) == 2);
    // auto preconditioning cannot fix a pure scaling obstruction either
    CHECK(run_cli({"invert", "--family", fam, "--muX", mux, "--set", set, "--precondition", "auto"}) == 2);
}

TEST_CASE("counterexample writes samples, sidecar, and plot data") {
    TempDir tmp;
    const std::string out = tmp.file("samples.csv");
    const std::string report = tmp.file("report.json");
    const int code = run_cli({"counterexample", "--alpha", "1", "--theta0", "1", "--a", "1", "--b", "0",
                              "--n", "500", "--seed", "7", "--out", out, "--report", report, "--plot",
                              tmp.file("plot")});
    CHECK(code == 0);
    const std::string csv = slurp(out);
    CHECK(csv.substr(0, 6) == "value\n");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 501);
    const Json sidecar = slurp_json(out + ".json");
    CHECK(sidecar["amplitude"].get<double>() == doctest::Approx(1.0 / std::sqrt(2.0)));
    const Json j = slurp_json(report);
    CHECK(j["certificate"]["non_rv"] == true);
    CHECK(fs::exists(tmp.file("plot") + "_oscillation.csv"));
}

TEST_CASE("simulate produces a readable batch and estimator report") {
    TempDir tmp;
    const std::string cfg = tmp.file("cfg.json");
    const std::string out = tmp.file("batch.bin");
    const std::string report = tmp.file("report.json");
    {
        std::ofstream(cfg) << R"({
            "law": {"type": "pareto", "alpha": 1.0, "xm": 1.0, "dim": 1},
            "family": {"kind": "scalars", "dim": 1, "entries": [1.0]},
            "n": 50000, "seed": 5,
            "estimators": {"hill_k": 1000, "ratio_thresholds": [2.0, 4.0]}
        })";
    }
    CHECK(run_cli({"simulate", "--config", cfg, "--out", out, "--report", report}) == 0);
    const auto batch = read_batch_file(out);
    CHECK(batch.n == 50000);
    CHECK(batch.dim == 1);
    const Json j = slurp_json(report);
    CHECK(j["hill"]["alpha_hat"].get<double>() == doctest::Approx(1.0).epsilon(0.15));
    CHECK(j["tail_ratio"].size() == 2);
}

TEST_CASE("verify-system reports the near-zero residual and the perturbed contrast") {
    TempDir tmp;
    const std::string report = tmp.file("vs.json");
    CHECK(run_cli({"verify-system", "--alpha", "1", "--theta0", "1", "--a", "1", "--b", "0", "--nodes",
                   "4000", "--report", report}) == 0);
    const Json j = slurp_json(report);
    CHECK(j["residual"].get<double>() <= 1e-8);
    CHECK(j["tv_window"].get<double>() > 0.1);
    CHECK(j["system_solved"] == true);

    const std::string report2 = tmp.file("vs2.json");
    CHECK(run_cli({"verify-system", "--alpha", "1", "--theta0", "1", "--a", "1", "--b", "0", "--nodes",
                   "4000", "--perturb-nu", "1.01", "--report", report2}) == 0);
    CHECK(slurp_json(report2)["residual"].get<double>() > 1e-4);
}

TEST_CASE("reports are byte-identical across runs (idempotence)") {
    TempDir tmp;
    const std::string r1 = tmp.file("r1.json");
    const std::string r2 = tmp.file("r2.json");
    for (const std::string& r : {r1, r2})
        CHECK(run_cli({"check", "--weights", "1,0.5,0.5", "--alpha", "1", "--theta-max", "6", "--report",
                       r}) == 0);
    CHECK(slurp(r1) == slurp(r2));
    CHECK(fs::exists(r1 + ".meta.json")); // volatile data lives in the sidecar
}

TEST_CASE("roundtrip command passes on the default panel") {
    TempDir tmp;
    const std::string muz = tmp.file("muz.json");
    const std::string fam = tmp.file("fam.json");
    const std::string report = tmp.file("rt.json");
    {
        std::ofstream(muz) << R"({"dim":2,"alpha":1,"spectral":[{"dir":[1,0],"w":1},{"dir":[0,1],"w":0.5}]})";
        std::ofstream(fam) << R"({"kind":"matrices","dim":2,"entries":[[[1,0],[0,1]],[[0.35,-0.35],[0.35,0.35]]]})";
    }
    CHECK(run_cli({"roundtrip", "--muZ", muz, "--family", fam, "--tol", "1e-9", "--report", report,
                   "--csv", tmp.file("rt.csv")}) == 0);
    const Json j = slurp_json(report);
    CHECK(j["all_pass"] == true);
    const std::string csv = slurp(tmp.file("rt.csv"));
    CHECK(csv.rfind("set_index,truth,recovered,bound,pass", 0) == 0);
}

TEST_CASE("mellin command writes a profile CSV with constant column count") {
    TempDir tmp;
    const std::string rho = tmp.file("rho.json");
    const std::string csv = tmp.file("mellin.csv");
    const std::string report = tmp.file("mellin.json");
    std::ofstream(rho) << R"({"dim":1,"atoms":[{"x":[1],"m":1},{"x":[0.5],"m":2}]})";
    CHECK(run_cli({"mellin", "--rho", rho, "--alpha", "1", "--theta-max", "6", "--grid-step", "0.01",
                   "--csv", csv, "--report", report}) == 0);
    const Json j = slurp_json(report);
    CHECK(j["min_abs_value"].get<double>() < 1e-3);
    CHECK(j["min_theta"].get<double>() ==
          doctest::Approx(std::numbers::pi / std::numbers::ln2).epsilon(1e-2));
    std::ifstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "theta,re,im,abs");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 3);
        ++rows;
    }
    CHECK(rows == 1201);
}
