#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dgdtrack/cli.hpp"
#include "dgdtrack/config.hpp"
#include "dgdtrack/io.hpp"

using namespace dgdtrack;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "dgdtrack_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

const char* kSmall = R"({
  "n_agents": 6, "dim": 3, "mu": 0.01, "L": 0.1, "eta": 0.05, "E": 5,
  "scheme": {"kind": "uniform"}, "C_max": 10, "sigma2": 1,
  "horizon": 40, "n_runs": 3, "master_seed": 5, "initial_radius": 0.5
})";

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::istringstream in(read_file(p));
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string c;
    while (std::getline(cells, c, ',')) row.push_back(std::stod(c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("minimal run writes a 10-row CSV and a manifest") {
  const auto dir = scratch("minimal");
  const auto cfg = write_config(dir, R"({"n_agents": 2, "dim": 1, "horizon": 10, "n_runs": 1})");
  const auto r = cli({"run", "--config", cfg.string(), "--out", (dir / "out").string()});
  REQUIRE(r.code == 0);
  const auto csv = read_file(dir / "out" / "uniform_E5.csv");
  CHECK(csv.rfind("t,rms_te,mean_fpte,mean_bias,bound,mean_fp_residual,n_runs\n", 0) == 0);
  CHECK(read_csv(dir / "out" / "uniform_E5.csv").size() == 10);
  const auto manifest = nlohmann::json::parse(read_file(dir / "out" / "manifest.json"));
  CHECK(manifest["n_agents"] == 2);
  CHECK(manifest["manifest"]["files"][0] == "uniform_E5.csv");
}

TEST_CASE("overrides take precedence over the file") {
  const auto dir = scratch("override");
  const auto cfg = write_config(dir, R"({"n_agents": 2, "dim": 1, "horizon": 5, "n_runs": 1, "E": 5})");
  const auto r = cli({"run", "--config", cfg.string(), "--set", "E=20", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(manifest["E"] == 20);
  CHECK(fs::exists(dir / "uniform_E20.csv"));

  const auto seeded = cli({"run", "--config", cfg.string(), "--seed", "99", "--out", (dir / "s").string()});
  REQUIRE(seeded.code == 0);
  CHECK(nlohmann::json::parse(read_file(dir / "s" / "manifest.json"))["master_seed"] == 99);
}

TEST_CASE("config errors exit with code 2") {
  const auto dir = scratch("errors");
  const auto unknown = write_config(dir, R"({"n_agents": 2, "horizn": 10})");
  auto r = cli({"run", "--config", unknown.string(), "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("horizn") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o"));

  std::ofstream(dir / "broken.json") << "{\n  \"n_agents\": 2,\n  \"dim\": ,\n}\n";
  r = cli({"run", "--config", (dir / "broken.json").string(), "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);

  const auto bad_value = write_config(dir, R"({"n_runs": 0})");
  CHECK(cli({"run", "--config", bad_value.string()}).code == 2);
  const auto bad_type = write_config(dir, R"({"n_runs": "many"})");
  CHECK(cli({"run", "--config", bad_type.string()}).code == 2);
  CHECK(cli({"run", "--config", (dir / "missing.json").string()}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
}

TEST_CASE("overrides parse JSON values and dotted keys") {
  nlohmann::json doc = nlohmann::json::object();
  apply_override(doc, "scheme.kind=discounted");
  apply_override(doc, "scheme.gamma=0.7");
  apply_override(doc, "E=10");
  const RunConfig rc = config_from_json(doc);
  CHECK(rc.experiment.scheme == WeightScheme::discounted(0.7));
  CHECK(rc.experiment.E == 10);
  apply_override(doc, "scheme.kind=uniform");
  CHECK(config_from_json(doc).experiment.scheme == WeightScheme::uniform());
  CHECK_THROWS_AS(apply_override(doc, "novalue"), ConfigError);
}

TEST_CASE("bounds with an explicit spectrum") {
  const auto dir = scratch("bounds");
  const auto cfg = write_config(dir, R"({"lambda2": 0.5, "lambdaN": -0.2})");
  const auto r = cli({"bounds", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Lambda = 2\n") != std::string::npos);
  CHECK(r.out.find("alpha = 0.997502498750") != std::string::npos);
  CHECK(r.out.find("t0 = 799\n") != std::string::npos);

  // The asymptote row carries the bias term alone.
  std::string bias;
  std::istringstream lines(r.out);
  std::string line, last;
  while (std::getline(lines, line)) {
    if (line.rfind("bias_term = ", 0) == 0) bias = line.substr(12);
    if (!line.empty()) last = line;
  }
  CHECK(last == "inf,0,0," + bias + "," + bias);

  const auto disc = cli({"bounds", "--config", cfg.string(), "--set", "scheme={\"kind\":\"discounted\",\"gamma\":0.7}",
                         "--out", dir.string()});
  REQUIRE(disc.code == 0);
  CHECK(fs::exists(dir / "bounds_discounted_gamma0.7_E5.csv"));
  const auto generated = cli({"bounds", "--config", write_config(dir, "{}").string()});
  CHECK(generated.code == 0);
  CHECK(generated.out.find("generated graph") != std::string::npos);
}

TEST_CASE("validate passes at desk scale and names injected faults") {
  const auto dir = scratch("validate");
  const auto cfg = write_config(dir, kSmall);
  auto r = cli({"validate", "--config", cfg.string()});
  CHECK_MESSAGE(r.code == 0, r.out);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS dgd.contraction") != std::string::npos);

  r = cli({"validate", "--config", cfg.string(), "--fault", "row-sum"});
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL mixing.row-sum") != std::string::npos);

  CHECK(cli({"validate", "--config", cfg.string(), "--fault", "nonsense"}).code == 2);
}

TEST_CASE("unstable step with override skips the contraction check") {
  const auto dir = scratch("unstable");
  const auto cfg = write_config(dir, kSmall);
  auto r = cli({"validate", "--config", cfg.string(), "--set", "eta=5", "--set", "mu=0.1", "--set", "L=0.1"});
  CHECK(r.code != 0);
  CHECK(r.out.find("FAIL run.simulate") != std::string::npos);
  r = cli({"validate", "--config", cfg.string(), "--set", "eta=5", "--set", "mu=0.1", "--set", "L=0.1", "--set",
           "allow_unstable_step=true"});
  CHECK(r.out.find("SKIP dgd.contraction") != std::string::npos);
  CHECK(r.out.find("FAIL dgd.contraction") == std::string::npos);
}

TEST_CASE("sweeping E orders the fixed-point tracking error") {
  const auto dir = scratch("sweepE");
  const auto cfg = write_config(dir, kSmall);
  const auto r = cli({"sweep", "--config", cfg.string(), "--param", "E", "--values", "1,5,10", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto e1 = read_csv(dir / "E=1" / "uniform_E1.csv");
  const auto e5 = read_csv(dir / "E=5" / "uniform_E5.csv");
  const auto e10 = read_csv(dir / "E=10" / "uniform_E10.csv");
  REQUIRE(e1.size() == 40);
  for (std::size_t k = 4; k < e1.size(); ++k) {
    CHECK(e5[k][2] < e1[k][2]);
    CHECK(e10[k][2] < e5[k][2]);
  }
}

TEST_CASE("sweeping the scheme keeps stream realizations common") {
  const auto dir = scratch("sweepScheme");
  const auto cfg = write_config(dir, kSmall);
  const auto r = cli({"sweep", "--config", cfg.string(), "--param", "scheme", "--values", "uniform,discounted", "--out",
                      dir.string()});
  REQUIRE(r.code == 0);
  const auto u = read_csv(dir / "scheme=uniform" / "uniform_E5.csv");
  const auto d = read_csv(dir / "scheme=discounted" / "discounted_gamma0.7_E5.csv");
  REQUIRE(u.size() == d.size());
  // At t = 1 both objectives are the first sample; only the bound column differs.
  for (std::size_t col : {0, 1, 2, 3, 5, 6}) CHECK(u[0][col] == d[0][col]);
  CHECK(u[5] != d[5]);
}

TEST_CASE("sweeping gamma orders the discounted plateau") {
  const auto dir = scratch("sweepGamma");
  const auto cfg = write_config(dir, kSmall);
  const auto r = cli({"sweep", "--config", cfg.string(), "--set", "horizon=300", "--param", "gamma", "--values",
                      "0.3,0.7,0.9", "--out", dir.string()});
  REQUIRE(r.code == 0);
  auto plateau = [&](const std::string& g) {
    const auto rows = read_csv(dir / ("gamma=" + g) / ("discounted_gamma" + g + "_E5.csv"));
    double sum = 0.0;
    int n = 0;
    for (const auto& row : rows)
      if (row[0] >= 250) {
        sum += row[2];
        ++n;
      }
    return sum / n;
  };
  CHECK(plateau("0.3") > plateau("0.7"));
  CHECK(plateau("0.7") > plateau("0.9"));
}

TEST_CASE("sweep argument errors") {
  const auto dir = scratch("sweepErr");
  const auto cfg = write_config(dir, kSmall);
  CHECK(cli({"sweep", "--config", cfg.string(), "--param", "E", "--values", "", "--out", dir.string()}).code == 2);
  CHECK(cli({"sweep", "--config", cfg.string(), "--param", "sigma2", "--values", "1", "--out", dir.string()}).code == 2);
}

TEST_CASE("a discount factor of one is rejected as a config error") {
  const auto dir = scratch("gamma");
  const auto cfg = write_config(dir, R"({"scheme": {"kind": "discounted", "gamma": 1.0}})");
  CHECK(cli({"bounds", "--config", cfg.string()}).code == 2);
}

TEST_CASE("a manifest fed back as a config reproduces the run bit for bit") {
  const auto dir = scratch("roundtrip");
  const auto cfg = write_config(dir, kSmall);
  REQUIRE(cli({"run", "--config", cfg.string(), "--out", (dir / "a").string(), "--threads", "1"}).code == 0);
  REQUIRE(cli({"run", "--config", (dir / "a" / "manifest.json").string(), "--out", (dir / "b").string(), "--threads",
               "4"})
              .code == 0);
  CHECK(read_file(dir / "a" / "uniform_E5.csv") == read_file(dir / "b" / "uniform_E5.csv"));
}

TEST_CASE("shipped configuration files parse") {
  const char* src = std::getenv("DGDTRACK_SOURCE_DIR");
  REQUIRE(src != nullptr);
  for (const auto& entry : fs::directory_iterator(fs::path(src) / "configs"))
    if (entry.path().extension() == ".json") CHECK_NOTHROW(load_config(entry.path()));
}
