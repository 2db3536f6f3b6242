#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef GPX_TOOL_PATH
#define GPX_TOOL_PATH "gpx"
#endif

namespace {

namespace fs = std::filesystem;

struct ToolRun {
  int exit_code = -1;
  std::string output;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "gpx_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

ToolRun run_tool(const std::string& args) {
  const fs::path log = work_dir() / "tool_output.txt";
  const std::string cmd = std::string(GPX_TOOL_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  ToolRun result;
  const int status = std::system(cmd.c_str());
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream buf;
  buf << in.rdbuf();
  result.output = buf.str();
  return result;
}

nlohmann::json load_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

std::string payload_without_meta(const fs::path& p) {
  auto doc = load_json(p);
  doc.erase("meta");
  return doc.dump();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("criterion verdicts") {
  const auto out = work_dir() / "criterion.json";
  auto res = run_tool("criterion --p -1 --n 1 --r 1 --alpha 2 --out " + out.string());
  CHECK(res.exit_code == 0);
  CHECK(load_json(out)["results"]["verdict"] == "zero");

  res = run_tool("criterion --p 0.5 --n 1 --r 1 --alpha 2 --tail-a 1 --tail-q 2 "
                 "--T 2 --out " +
                 out.string());
  CHECK(res.exit_code == 0);
  const auto doc = load_json(out);
  CHECK(doc["results"]["verdict"] == "one");
  CHECK(doc["results"]["integral"]["verdict"] == "finite");
  CHECK(std::abs(doc["results"]["integral"]["value"].get<double>() - 1.442695) < 1e-5);
}

TEST_CASE("tail reports are deterministic for a fixed seed") {
  const auto out1 = work_dir() / "tail1.json";
  const auto out2 = work_dir() / "tail2.json";
  const auto out3 = work_dir() / "tail3.json";
  const std::string base =
      "tail --family powered-exp --alpha 1 --c 1 --n 2 --r 1 --u -10 --theta 0.5 "
      "--reps 2000";
  CHECK(run_tool(base + " --seed 7 --out " + out1.string()).exit_code == 0);
  CHECK(run_tool(base + " --seed 7 --out " + out2.string()).exit_code == 0);
  CHECK(run_tool(base + " --seed 8 --out " + out3.string()).exit_code == 0);
  CHECK(payload_without_meta(out1) == payload_without_meta(out2));
  CHECK(payload_without_meta(out1) != payload_without_meta(out3));
  CHECK(load_json(out1)["results"]["p_hat"].get<double>() == 1.0);
}

TEST_CASE("simulate writes the documented CSV") {
  const auto out = work_dir() / "ens.csv";
  const auto res = run_tool("simulate --family powered-exp --alpha 1 --c 1 "
                            "--horizon 2 --mesh 0.5 --n 2 --seed 3 --out " +
                            out.string());
  CHECK(res.exit_code == 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,path_1,path_2");
}

TEST_CASE("pickands subcommand produces a ladder and a fit") {
  const auto out = work_dir() / "pick.json";
  const auto csv = work_dir() / "pick.csv";
  const auto res = run_tool("pickands --alpha 2 --k 1 --T 2 4 8 --theta 0.1 "
                            "--reps 500 --seed 5 --out " +
                            out.string() + " --csv " + csv.string());
  CHECK(res.exit_code == 0);
  const auto doc = load_json(out);
  CHECK(doc["results"]["ladder"].size() == 3);
  CHECK(doc["results"].contains("extrapolation"));
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "alpha,k,T,theta,value,ci,replicates");
}

TEST_CASE("plot accepts an empty crossing set") {
  const auto csv = work_dir() / "empty.csv";
  {
    std::ofstream out(csv);
    out << "t,x_value,f_p,crossed\n";
    for (int i = 0; i < 10; ++i)
      out << i << "," << -1.0 - 0.1 * i << "," << 2.0 << ",0\n";
  }
  const auto svg = work_dir() / "empty.svg";
  const auto res = run_tool("plot --in " + csv.string() + " --out " + svg.string());
  CHECK(res.exit_code == 0);
  std::ifstream in(svg);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  CHECK(content.find("<svg") == 0);
  CHECK(content.find("<circle") == std::string::npos);
  CHECK(content.rfind("</svg>") != std::string::npos);
}

TEST_CASE("plot marks crossings when present") {
  const auto csv = work_dir() / "crossed.csv";
  {
    std::ofstream out(csv);
    out << "t,x_value,f_p,crossed\n";
    for (int i = 0; i < 10; ++i)
      out << i << "," << (i == 4 ? 3.0 : -1.0) << "," << 2.0 << ","
          << (i == 4 ? 1 : 0) << "\n";
  }
  const auto svg = work_dir() / "crossed.svg";
  CHECK(run_tool("plot --in " + csv.string() + " --out " + svg.string()).exit_code == 0);
  std::ifstream in(svg);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str().find("<circle") != std::string::npos);
}

TEST_CASE("config file layering with flag override") {
  const auto cfg = work_dir() / "config.json";
  {
    std::ofstream out(cfg);
    out << R"({"p": -1, "alpha": 2, "n": 1, "r": 1})";
  }
  const auto out = work_dir() / "layered.json";
  auto res = run_tool("--config " + cfg.string() + " criterion --out " + out.string());
  CHECK(res.exit_code == 0);
  CHECK(load_json(out)["results"]["verdict"] == "zero");
  // explicit flag wins over the file
  res = run_tool("--config " + cfg.string() + " criterion --p 1 --out " + out.string());
  CHECK(res.exit_code == 0);
  CHECK(load_json(out)["results"]["verdict"] == "one");
}

TEST_CASE("lil subcommand dumps a crossing series and a plot") {
  const auto out = work_dir() / "lil.json";
  const auto csv = work_dir() / "lil_crossings.csv";
  const auto svg = work_dir() / "lil_plot.svg";
  const auto res = run_tool(
      "lil --family powered-exp --alpha 2 --c 1 --p 1 --horizon 1000 --theta 0.5 "
      "--runs 2 --seed 9 --out " +
      out.string() + " --crossings-csv " + csv.string() + " --dump-stride 8 --svg " +
      svg.string());
  CHECK(res.exit_code == 0);
  const auto doc = load_json(out);
  CHECK(doc["results"]["character"] == "diagnostic");
  CHECK(doc["results"]["per_run"].size() == 2);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x_value,f_p,crossed");
  std::ifstream svg_in(svg);
  std::string first;
  std::getline(svg_in, first);
  CHECK(first.find("<svg") == 0);
}

TEST_CASE("berman batch mode emits the documented CSV") {
  const auto out = work_dir() / "berman.csv";
  const auto res = run_tool("berman --batch --d-max 3 --n 2 --r 1 --count 8 "
                            "--seed 5 --out " +
                            out.string());
  CHECK(res.exit_code == 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "instance_id,d,n,r,lhs_diff,bound,ratio");
}

TEST_CASE("validation failures exit with code 2") {
  CHECK(run_tool("tail --reps 10").exit_code == 2);           // replicate floor
  CHECK(run_tool("berman").exit_code == 2);                   // missing mode
  CHECK(run_tool("criterion --alpha 7").exit_code == 2);      // bad exponent
  CHECK(run_tool("--bogus-flag criterion --p 1").exit_code == 2);
  CHECK(run_tool("plot --in /nonexistent.csv --out x.svg").exit_code == 1);
}

}  // TEST_SUITE
