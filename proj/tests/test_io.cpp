#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "floquet_pt/io.hpp"

using namespace floquet_pt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("floquet_pt_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("figure presets carry the caption parameters exactly") {
  struct Expected {
    const char* name;
    double d0, d1;
    double frac;  // T0 / T
  };
  const Expected table[] = {
      {"fig1", 1.0, 1.0, 0.5},  {"fig2", 1.0, 1.0, 0.5},   {"fig3a", 1.0, 1.0, 0.5},
      {"fig3b", 1.0, 1.0, 0.5}, {"fig3c", 1.0, 1.0, 0.55}, {"fig4a", 1.0, 0.0, 0.5},
      {"fig4b", 1.0, -0.2, 0.55}, {"fig5", 1.0, 1.0, 0.4},
  };
  for (const Expected& e : table) {
    const FigurePreset* p = find_preset(e.name);
    REQUIRE(p != nullptr);
    CHECK(p->base.seg0.delta == e.d0);
    CHECK(p->base.seg1.delta == e.d1);
    const double period = p->base.seg0.duration + p->base.seg1.duration;
    CHECK(p->base.seg0.duration / period == Catch::Approx(e.frac).epsilon(1e-14));
  }

  // fig5 pins omega = 3; fig3b/3c sweep antisymmetric dissipation.
  const FigurePreset* fig5 = find_preset("fig5");
  CHECK(derived_quantities(fig5->base).omega == Catch::Approx(3.0).epsilon(1e-14));
  CHECK(find_preset("fig3b")->y_axis.name == "gamma_antisym");
  CHECK(find_preset("fig3c")->y_axis.name == "gamma_antisym");
  CHECK(find_preset("fig4a")->y_axis.name == "gamma_common");
  CHECK(find_preset("nope") == nullptr);
}

TEST_CASE("parse_config accepts a minimal classify document") {
  const RunConfig cfg = parse_config(std::string(R"({
    "protocol": {"delta0": 1, "delta1": 1, "gamma0": 0.2, "gamma1": 0,
                 "t0": 3.14159, "t1": 3.14159}
  })"));
  CHECK(cfg.protocol.seg0.gamma == 0.2);
  CHECK(cfg.protocol.seg1.duration == Catch::Approx(3.14159));
  CHECK(cfg.ep_tol == kDefaultEpTol);
}

TEST_CASE("parse_config rejects malformed documents by name") {
  SECTION("both time conventions") {
    const std::string doc = R"({"protocol": {"delta0":1,"delta1":1,"gamma0":0,"gamma1":0,
      "t0":1,"t1":1,"omega":1}})";
    CHECK_THROWS_MATCHES(parse_config(doc), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("not both")));
  }
  SECTION("unknown key is named") {
    const std::string doc = R"({"protocol": {"delta0":1,"delta1":1,"gamma0":0,"gamma1":0,
      "omega":1,"gamma2":0.5}})";
    CHECK_THROWS_MATCHES(parse_config(doc), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("gamma2")));
  }
  SECTION("missing required key is named") {
    const std::string doc = R"({"protocol": {"delta0":1,"gamma0":0,"gamma1":0,"omega":1}})";
    CHECK_THROWS_MATCHES(parse_config(doc), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("delta1")));
  }
  SECTION("malformed number") {
    const std::string doc = R"({"protocol": {"delta0":"one","delta1":1,"gamma0":0,
      "gamma1":0,"omega":1}})";
    CHECK_THROWS_MATCHES(parse_config(doc), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("delta0")));
  }
  SECTION("malformed JSON") {
    CHECK_THROWS_AS(parse_config(std::string("{not json")), ConfigError);
  }
  SECTION("nonpositive duration surfaces as a config error") {
    const std::string doc = R"({"protocol": {"delta0":1,"delta1":1,"gamma0":0,"gamma1":0,
      "t0":1,"t1":0}})";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
  }
}

TEST_CASE("preset_config round-trips through parse_config") {
  const FigurePreset* fig1 = find_preset("fig1");
  const RunConfig cfg = parse_config(preset_config(*fig1));
  CHECK(cfg.protocol.seg0.delta == 1.0);
  CHECK(cfg.protocol.seg1.gamma == 0.0);
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->x_param == "omega");
  CHECK(cfg.sweep->x_min == 0.8);
  CHECK(cfg.sweep->x_max == 1.25);
  CHECK(cfg.sweep->y_max == 0.5);
}

TEST_CASE("format_sci emits 17 significant digits") {
  CHECK(format_sci(1.0) == "1.0000000000000000e+00");
  CHECK(format_sci(-0.4999999999999999) == "-4.9999999999999989e-01");
}

TEST_CASE("classify command writes a summary that round-trips") {
  TempDir tmp;
  RunConfig cfg = parse_config(preset_config(*find_preset("fig1")));
  cfg.protocol.seg0.gamma = 0.2;  // gamma/delta = 0.2 row
  cfg.out_dir = tmp.path.string();

  std::ostringstream out;
  run_command(cfg, Command::Classify, out);
  CHECK(out.str().find("label=BrokenN1") != std::string::npos);

  const Json summary = Json::parse(slurp(tmp.path / "classify_summary.json"));
  CHECK(summary["label"] == "BrokenN1");
  CHECK(summary["n"] == 1);

  // Re-parse the echoed protocol and reproduce the classification.
  const Json& proto = summary["protocol"];
  const DriveProtocol echoed{{proto["delta0"], proto["gamma0"], proto["t0"]},
                             {proto["delta1"], proto["gamma1"], proto["t1"]}};
  const double pi_again = pi_closed_form(echoed);
  CHECK(phase_name(classify(pi_again).phase) == summary["label"].get<std::string>());
  CHECK(pi_again == Catch::Approx(summary["pi"].get<double>()).epsilon(1e-15));
}

TEST_CASE("sweep command output is deterministic byte for byte") {
  TempDir tmp;
  RunConfig cfg = parse_config(preset_config(*find_preset("fig2")));
  cfg.sweep->x_count = 24;
  cfg.sweep->y_count = 16;
  cfg.out_dir = (tmp.path / "run1").string();

  std::ostringstream out;
  run_command(cfg, Command::Sweep, out);
  const std::string csv1 = slurp(tmp.path / "run1" / "sweep.csv");

  cfg.out_dir = (tmp.path / "run2").string();
  run_command(cfg, Command::Sweep, out);
  const std::string csv2 = slurp(tmp.path / "run2" / "sweep.csv");

  CHECK(csv1 == csv2);
  CHECK(csv1.rfind("x,y,pi,label,n,re_e_plus,im_e_plus\n", 0) == 0);

  const Json summary = Json::parse(slurp(tmp.path / "run1" / "sweep_summary.json"));
  CHECK(summary["x_count"] == 24);
  CHECK(summary["counts"].contains("PTSymmetric"));

  // The .dat twin exists and is space-delimited.
  const std::string dat = slurp(tmp.path / "run1" / "sweep.dat");
  CHECK(dat.find(',') == std::string::npos);
}

TEST_CASE("ep command refines the high-frequency boundary crossing") {
  TempDir tmp;
  Json doc = preset_config(*find_preset("fig5"));
  doc["ep"] = {{"param", "gamma0"},
               {"boundary", "plus_one"},
               {"bracket_lo", 2.0},
               {"bracket_hi", 3.5}};
  doc["out"] = tmp.path.string();
  RunConfig cfg = parse_config(doc);

  std::ostringstream out;
  run_command(cfg, Command::Ep, out);
  const Json summary = Json::parse(slurp(tmp.path / "ep_summary.json"));
  CHECK(summary["ray_parameter"].get<double>() == Catch::Approx(2.690363474781336).margin(1e-6));
  CHECK(summary["residual"].get<double>() <= 1e-10);
}

TEST_CASE("run_command_catching maps failures to exit categories") {
  TempDir tmp;
  std::ostringstream out, err;

  // Missing ep block -> config error.
  RunConfig cfg = parse_config(preset_config(*find_preset("fig1")));
  cfg.out_dir = tmp.path.string();
  CHECK(run_command_catching(cfg, Command::Ep, out, err) == kExitConfig);

  // Bracket without sign change -> numeric error.
  Json doc = preset_config(*find_preset("fig1"));
  doc["ep"] = {{"param", "gamma0"},
               {"boundary", "plus_one"},
               {"bracket_lo", 0.0},
               {"bracket_hi", 0.05}};
  doc["out"] = tmp.path.string();
  cfg = parse_config(doc);
  CHECK(run_command_catching(cfg, Command::Ep, out, err) == kExitNumeric);
  CHECK(err.str().find("numeric error") != std::string::npos);

  // Success path.
  CHECK(run_command_catching(cfg, Command::Classify, out, err) == kExitOk);
}

TEST_CASE("dynamics and hfcompare and resonances commands emit their files") {
  TempDir tmp;
  Json doc = preset_config(*find_preset("fig1"));
  doc["protocol"]["gamma0"] = 0.2;
  doc["dynamics"] = {{"periods", 150}, {"substeps_per_segment", 4}, {"discard", 50}};
  doc["hfcompare"] = {{"t_start", 0.4}, {"halvings", 5}};
  doc["resonances"] = {{"k_max", 4}};
  doc["out"] = tmp.path.string();
  const RunConfig cfg = parse_config(doc);

  std::ostringstream out;
  run_command(cfg, Command::Dynamics, out);
  run_command(cfg, Command::HfCompare, out);
  run_command(cfg, Command::Resonances, out);

  CHECK(fs::exists(tmp.path / "trajectory.csv"));
  const Json dyn = Json::parse(slurp(tmp.path / "dynamics_summary.json"));
  CHECK(dyn["label"] == "BrokenN1");
  CHECK(dyn["growth_rate"].get<double>() ==
        Catch::Approx(dyn["expected_rate"].get<double>()).epsilon(0.02));

  const Json hf = Json::parse(slurp(tmp.path / "hfcompare_summary.json"));
  REQUIRE(hf["rows"].size() == 5);
  // Successive halvings shrink the error ~16x.
  const double r0 = hf["rows"][0]["diff"].get<double>();
  const double r1 = hf["rows"][1]["diff"].get<double>();
  CHECK(r0 / r1 == Catch::Approx(16.0).epsilon(0.2));

  const Json res = Json::parse(slurp(tmp.path / "resonances_summary.json"));
  REQUIRE(res["predictions"].size() == 4);
  CHECK(res["predictions"][0]["breaking_expected"] == true);
  CHECK(res["predictions"][1]["breaking_expected"] == true);  // gamma imbalance
}
