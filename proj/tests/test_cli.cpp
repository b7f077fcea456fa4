#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "app.hpp"
#include "doctest.h"
#include "io.hpp"

namespace fs = std::filesystem;
using microrev::cli::run_cli;
using doctest::Approx;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("microrev_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Minimal RFC 4180 reader, kept separate from the writer under test.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t k = 0; k < text.size(); ++k) {
    const char c = text[k];
    if (quoted) {
      if (c == '"' && k + 1 < text.size() && text[k + 1] == '"') {
        field.push_back('"');
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\r' && k + 1 < text.size() && text[k + 1] == '\n') {
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
      ++k;
    } else {
      field.push_back(c);
    }
  }
  return rows;
}

using Table = std::vector<std::map<std::string, std::string>>;

Table read_table(const fs::path& p) {
  const auto rows = parse_csv(slurp(p));
  Table t;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::map<std::string, std::string> m;
    for (std::size_t c = 0; c < rows[0].size(); ++c) m[rows[0][c]] = rows[r].at(c);
    t.push_back(m);
  }
  return t;
}

double num(const std::string& s) { return microrev::cli::parse_double(s); }

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::string& value) : name_(name) { ::setenv(name, value.c_str(), 1); }
  ~ScopedEnv() { ::unsetenv(name_); }

 private:
  const char* name_;
};

}  // namespace

TEST_CASE("complex amplitude text form") {
  using microrev::cli::parse_complex;
  CHECK(parse_complex("1.5") == microrev::ComplexAmplitude(1.5, 0.0));
  CHECK(parse_complex("1+2i") == microrev::ComplexAmplitude(1.0, 2.0));
  CHECK(parse_complex("-1.3+0.7i") == microrev::ComplexAmplitude(-1.3, 0.7));
  CHECK(parse_complex("1-0.5i") == microrev::ComplexAmplitude(1.0, -0.5));
  CHECK(parse_complex("2.5i") == microrev::ComplexAmplitude(0.0, 2.5));
  CHECK(parse_complex("-i") == microrev::ComplexAmplitude(0.0, -1.0));
  CHECK(parse_complex("1e-3-2E+1j") == microrev::ComplexAmplitude(1e-3, -20.0));
  CHECK(parse_complex(" 3 - 4i ") == microrev::ComplexAmplitude(3.0, -4.0));
  for (const char* bad : {"", "x", "1+", "1+2", "1,5", "1.5.2i", "nan", "inf"}) {
    CHECK_THROWS_AS(parse_complex(bad), microrev::cli::UsageError);
  }
}

TEST_CASE("number formatting round-trips and ignores locale") {
  using microrev::cli::format_number;
  for (double x : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -1.7976931348623157e308}) {
    CHECK(num(format_number(x)) == x);
    CHECK(format_number(x).find(',') == std::string::npos);
  }
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("CSV quoting") {
  using microrev::cli::csv_escape;
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");

  std::ostringstream os;
  microrev::cli::CsvWriter w(os);
  w.row({"x", "error: a, b", "q\"uote"});
  CHECK(os.str() == "x,\"error: a, b\",\"q\"\"uote\"\r\n");
  const auto back = parse_csv(os.str());
  REQUIRE(back.size() == 1);
  CHECK(back[0] == std::vector<std::string>{"x", "error: a, b", "q\"uote"});
}

TEST_CASE("ratio examples") {
  auto r = run({"ratio", "--alpha-i", "0", "--alpha-f", "0", "--nth", "1", "--tau", "0.7"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["log_ratio"].get<double>() == 0.0);
  CHECK(j["upsilon"].get<double>() == 1.0);

  r = run({"ratio", "--alpha-i", "3.14", "--alpha-f", "2.17", "--nth", "3.57", "--tau", "0.7"});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["log_upsilon"].get<double>() - std::log(1.57)) < 0.05 * std::log(1.57));

  r = run({"ratio", "--engine", "fock", "--dim", "40", "--alpha-i", "1", "--alpha-f", "0.5", "--nth", "1", "--tau", "0.7"});
  REQUIRE(r.code == 0);
  const auto fock = nlohmann::json::parse(r.out);
  const auto analytic = nlohmann::json::parse(
      run({"ratio", "--alpha-i", "1", "--alpha-f", "0.5", "--nth", "1", "--tau", "0.7"}).out);
  for (const char* key : {"p_fwd", "p_bwd"}) {
    const double a = analytic[key].get<double>();
    CHECK(std::abs(fock[key].get<double>() - a) / a < 1e-6);
  }
  CHECK(std::abs(fock["log_ratio"].get<double>() - 0.875) < 1e-6);
  CHECK(fock["fock_dim"] == 40);

  // --beta and complex amplitudes (negative values need the = form).
  r = run({"ratio", "--alpha-i=-1.3+0.7i", "--alpha-f", "1-2i", "--beta", "0.5", "--tau", "0.25"});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["alpha_i"]["re"].get<double>() == -1.3);
  CHECK(j["alpha_f"]["im"].get<double>() == -2.0);
  CHECK(j["log_ratio"].get<double>() == Approx(j["predicted_log_ratio"].get<double>()).epsilon(1e-12));
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"ratio", "--help"}).code == 0);

  const std::vector<std::vector<std::string>> usage{
      {"ratio", "--alpha-i", "x", "--alpha-f", "0", "--nth", "1", "--tau", "0.7"},
      {"ratio", "--alpha-i", "1", "--alpha-f", "0", "--nth", "1", "--tau", "1.5"},
      {"ratio", "--alpha-i", "1", "--alpha-f", "0", "--nth", "-1", "--tau", "0.5"},
      {"ratio", "--alpha-i", "1", "--alpha-f", "0", "--tau", "0.5"},
      {"ratio", "--alpha-i", "1", "--alpha-f", "0", "--nth", "1", "--beta", "1", "--tau", "0.5"},
      {"ratio", "--alpha-i", "1", "--alpha-f", "0", "--nth", "0", "--tau", "0.5"},
      {"ratio", "--alpha-i", "1", "--alpha-f", "0", "--nth", "1", "--tau", "0.5", "--engine", "magic"},
      {"ratio", "--alpha-f", "0", "--nth", "1", "--tau", "0.5"},
      {"oracle-check", "--dim", "1"},
      {"oracle-check", "--tolerance", "-1"},
      {"experiment", "--samples", "2"},
      {"sweep-fig3", "--nth-list", "1,-2"},
      {"sweep-fig3", "--tau-list", "0.2,0.3"},
      {"sweep-upsilon", "--config", "/nonexistent/config.json"},
  };
  for (const auto& args : usage) {
    const auto r = run(args);
    INFO(args[0], " ", args.size(), " -> ", r.err);
    CHECK(r.code == 2);
    CHECK(r.err.rfind("usage error: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  }

  // Oracle truncation failure is a check failure, not a usage error.
  const auto r = run({"ratio", "--engine", "fock", "--dim", "3", "--alpha-i", "1", "--alpha-f", "1", "--nth", "1", "--tau",
                      "0.5"});
  CHECK(r.code == 1);
  CHECK(nlohmann::json::parse(r.out)["status"].get<std::string>().find("neglected tail") != std::string::npos);
}

TEST_CASE("oracle-check") {
  auto r = run({"oracle-check", "--dim", "40"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["passed"] == true);
  for (const auto& c : j["checks"]) {
    CHECK(c["passed"] == true);
    if (c["name"] == "gaussian_equivalence") CHECK(c["max_error"].get<double>() < 1e-6);
  }

  r = run({"oracle-check", "--dim", "4"});
  CHECK(r.code == 1);
  j = nlohmann::json::parse(r.out);
  CHECK(j["passed"] == false);
  bool truncation_reported = false;
  for (const auto& c : j["checks"]) {
    if (c["error"].is_string() && c["error"].get<std::string>().rfind("TruncationTooSmall", 0) == 0) {
      truncation_reported = true;
      CHECK(c["passed"] == false);
      CHECK(c["max_error"].is_null());
    }
  }
  CHECK(truncation_reported);

  r = run({"oracle-check", "--dim", "40", "--tolerance", "1e-20"});
  CHECK(r.code == 1);
  j = nlohmann::json::parse(r.out);
  bool measured_failure = false;
  for (const auto& c : j["checks"]) {
    CHECK(c["tolerance"].get<double>() == 1e-20);
    if (!c["passed"].get<bool>() && c["max_error"].is_number()) measured_failure = true;
  }
  CHECK(measured_failure);
}

TEST_CASE("sweep-fig3 default grid") {
  const auto dir = scratch("fig3");
  const auto r = run({"sweep-fig3", "--output", (dir / "fig3.csv").string()});
  REQUIRE(r.code == 0);
  const auto table = read_table(dir / "fig3.csv");
  REQUIRE(table.size() == 80);
  std::size_t mc = 0, within = 0;
  for (const auto& row : table) {
    CHECK(row.at("status") == "ok");
    if (row.at("engine") == "analytic") {
      CHECK(std::abs(num(row.at("log_ratio")) - num(row.at("predicted_log_ratio"))) < 1e-10);
    } else {
      ++mc;
      if (row.at("within_4se") == "true") ++within;
    }
    // 85% reflectivity at n_th = 1.62, 70% elsewhere.
    CHECK(num(row.at("tau")) == Approx(num(row.at("n_th")) == 1.62 ? 0.15 : 0.3));
  }
  CHECK(mc == 40);
  CHECK(static_cast<double>(within) >= 0.95 * static_cast<double>(mc));
  // Rows at n_th = 1.22 carry the complex phase pi/4.
  CHECK(num(table.front().at("alpha_i_re")) == Approx(num(table.front().at("alpha_i_im"))));
}

TEST_CASE("sweep-fig3 validation and determinism") {
  const auto dir = scratch("fig3_small");
  {
    std::ofstream(dir / "empty.json") << R"({"nth_list": []})";
    const auto r = run({"sweep-fig3", "--config", (dir / "empty.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("nth_list") != std::string::npos);
  }
  {
    std::ofstream(dir / "typo.json") << R"({"nth_lst": [1.0]})";
    CHECK(run({"sweep-fig3", "--config", (dir / "typo.json").string()}).code == 2);
  }
  std::ofstream(dir / "small.json") << R"({"amplitudes_i": [1.5, "2+0.5i"], "amplitudes_f": [1.0],
      "nth_list": [1.0, 2.4], "tau_list": [0.3], "mc_samples": 3000, "n_resamples": 200})";
  const std::vector<std::string> base{"sweep-fig3", "--config", (dir / "small.json").string()};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
  };
  REQUIRE(run(with({"--output", (dir / "a.csv").string(), "--threads", "1"})).code == 0);
  REQUIRE(run(with({"--output", (dir / "b.csv").string(), "--threads", "3"})).code == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(read_table(dir / "a.csv").size() == 2 * 2 * 1 * 2);

  REQUIRE(run(with({"--output", (dir / "c.csv").string(), "--seed", "7"})).code == 0);
  CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));

  // Flags override the file.
  REQUIRE(run(with({"--output", (dir / "d.csv").string(), "--nth-list", "1.5", "--engines", "analytic"})).code == 0);
  const auto d = read_table(dir / "d.csv");
  REQUIRE(d.size() == 2);
  CHECK(num(d[0].at("n_th")) == 1.5);

  // A failing row is flagged and turns the exit code to 1; the file is still written.
  const auto r = run(with({"--output", (dir / "e.csv").string(), "--alpha-f-list", "40", "--engines", "analytic,montecarlo"}));
  CHECK(r.code == 1);
  const auto e = read_table(dir / "e.csv");
  REQUIRE(e.size() == 8);
  for (const auto& row : e) {
    if (row.at("engine") == "montecarlo") {
      CHECK(row.at("status").rfind("error: ", 0) == 0);
      CHECK(row.at("log_ratio").empty());
    } else {
      CHECK(row.at("status") == "ok");
    }
  }
}

TEST_CASE("sweep-upsilon") {
  const auto dir = scratch("upsilon");
  REQUIRE(run({"sweep-upsilon", "--output", (dir / "u.csv").string()}).code == 0);
  const auto table = read_table(dir / "u.csv");
  REQUIRE(table.size() == 9 * 36);

  // Delta|alpha|^2 = 0 series: least-squares slope of log Upsilon against
  // |alpha|^2_tot is cosh(beta) - 1.
  std::map<double, std::vector<std::pair<double, double>>> diagonal;
  for (const auto& row : table) {
    if (num(row.at("delta_alpha_sq")) == 0.0) {
      diagonal[num(row.at("beta"))].emplace_back(num(row.at("alpha_sq_tot")), num(row.at("log_upsilon")));
    }
  }
  REQUIRE(diagonal.size() == 9);
  for (const auto& [beta, pts] : diagonal) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::abs(slope - (std::cosh(beta) - 1.0)) < 1e-9);
  }

  std::size_t small_beta_rows = 0;
  for (const auto& row : table) {
    if (num(row.at("beta")) != 0.01) continue;
    ++small_beta_rows;
    CHECK(std::abs(num(row.at("log_upsilon_per_tot")) / num(row.at("half_beta_sq")) - 1.0) < 0.01);
  }
  CHECK(small_beta_rows == 36);

  std::ofstream(dir / "one.json") << R"({"amplitudes_i": [2], "amplitudes_f": [1], "nth_list": [1.0], "beta_list": []})";
  REQUIRE(run({"sweep-upsilon", "--config", (dir / "one.json").string(), "--output", (dir / "one.csv").string()}).code == 0);
  const auto lines = parse_csv(slurp(dir / "one.csv"));
  CHECK(lines.size() == 2);

  std::ofstream(dir / "none.json") << R"({"nth_list": [], "beta_list": []})";
  CHECK(run({"sweep-upsilon", "--config", (dir / "none.json").string()}).code == 2);
}

TEST_CASE("experiment") {
  const auto a = scratch("exp_a");
  const auto b = scratch("exp_b");
  const auto ra = run({"experiment", "--output-dir", a.string()});
  const auto rb = run({"experiment", "--output-dir", b.string()});
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  CHECK(slurp(a / "experiment.csv") == slurp(b / "experiment.csv"));
  CHECK(slurp(a / "experiment.json") == slurp(b / "experiment.json"));
  CHECK(ra.out == rb.out);

  const auto j = nlohmann::json::parse(slurp(a / "experiment.json"));
  CHECK(j["query"]["alpha_i"]["re"] == 2.0);
  CHECK(j["query"]["alpha_f"]["re"] == 1.5);
  CHECK(j["query"]["n_th"] == 1.62);
  CHECK(j["query"]["tau"] == 0.15);
  CHECK(j["samples"] == 50000);
  const double se = j["estimate"]["std_error"].get<double>();
  CHECK(std::abs(j["estimate"]["point"].get<double>() - j["predicted_log_ratio"].get<double>()) < 4.0 * se);
  CHECK(j["within_4se"] == true);

  const auto small = run({"experiment", "--samples", "10", "--output-dir", a.string(), "--prefix", "small"});
  REQUIRE(small.code == 0);
  const auto s = nlohmann::json::parse(small.out);
  const double width = s["estimate"]["ci_high"].get<double>() - s["estimate"]["ci_low"].get<double>();
  CHECK(width > j["estimate"]["ci_high"].get<double>() - j["estimate"]["ci_low"].get<double>());
  CHECK(fs::exists(a / "small.csv"));

  CHECK(run({"experiment", "--alpha-f", "40", "--nth", "1", "--tau", "0.5", "--output-dir", a.string()}).code == 1);
}

TEST_CASE("MICROREV_OUTPUT_DIR redirects every output") {
  const auto target = scratch("env_target");
  const auto ignored = scratch("env_ignored");
  const ScopedEnv env("MICROREV_OUTPUT_DIR", target.string());
  REQUIRE(run({"sweep-upsilon", "--output", (ignored / "u.csv").string()}).code == 0);
  REQUIRE(run({"experiment", "--samples", "500", "--output-dir", ignored.string()}).code == 0);
  REQUIRE(run({"oracle-check", "--dim", "40", "--output", (ignored / "report.json").string()}).code == 0);
  CHECK(fs::exists(target / "u.csv"));
  CHECK(fs::exists(target / "experiment.csv"));
  CHECK(fs::exists(target / "experiment.json"));
  CHECK(fs::exists(target / "report.json"));
  CHECK(fs::is_empty(ignored));
}
