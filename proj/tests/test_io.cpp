#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aperiodix/io.hpp"

using namespace aperiodix;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "aperiodix_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  const fs::path out = scratch("cli_stdout.txt");
  int status = std::system((std::string(APERIODIX_CLI) + " " + args + " > " + out.string() + " 2>/dev/null").c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

}  // namespace

TEST(Format, FifteenDigits) {
  EXPECT_EQ(io::fmt15(0.1), "0.1");
  EXPECT_EQ(io::fmt15(1.0 / 3), "0.333333333333333");
  EXPECT_EQ(io::num(2.0 / 3).dump(), "0.666666666666667");
  EXPECT_EQ(io::fmt15(INFINITY), "inf");
}

TEST(RuleJson, ParsesAndValidates) {
  auto f = io::family_from_json(io::Json::parse(R"({"name":"f","alphabet":["a","b"],"images":{"a":"ab","b":"a"}})"));
  EXPECT_EQ(f.rule.images[0], "ab");
  EXPECT_FALSE(f.builtin);
  EXPECT_NEAR(f.diffraction_lengths.at('a'), (1 + std::sqrt(5.0)) / 2, 1e-12);
  auto t = io::family_from_json(io::Json::parse(
      R"({"alphabet":["A","B"],"images":{"A":"AB","B":"BA"},"tiles":{"A":"a","B":"b"},"tile_lengths":{"a":1,"b":1.5}})"));
  EXPECT_EQ(t.tiles, "ab");
  EXPECT_EQ(t.diffraction_lengths.at('b'), 1.5);
  for (const char* bad : {R"({"alphabet":["a"],"images":{}})", R"({"alphabet":["ab"],"images":{"ab":"a"}})",
                          R"({"alphabet":["a","b"],"images":{"a":"ac","b":"a"}})", R"([1,2])"}) {
    try {
      io::family_from_json(io::Json::parse(bad));
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidRule) << bad;
    }
  }
}

TEST(Csv, SpectrumRoundTrip) {
  EnergySpectrum s{{-0.75, -0.1, 0.3333333333333333, 1.2}, Boundary::Open};
  std::string text = io::spectrum_csv(s);
  EXPECT_EQ(text.substr(0, 17), "index,eigenvalue\n");
  auto back = io::spectrum_from_text(text);
  ASSERT_EQ(back.size(), 4u);
  EXPECT_NEAR(back.eigenvalues[2], 1.0 / 3, 1e-15);
  EXPECT_THROW(io::spectrum_from_text("index,eigenvalue\n0,1\n1,0\n"), Error);
  EXPECT_THROW(io::spectrum_from_text("0;1\n"), Error);
}

TEST(Json, GapsRoundTrip) {
  Gap g;
  g.lower = -0.5;
  g.upper = 0.25;
  g.width = 0.75;
  g.index = 12;
  g.ids_value = 0.375;
  g.bulk_ids = 0.38;
  io::Json j;
  j["gaps"] = io::Json::array({io::gap_json(g)});
  auto back = io::gaps_from_json(io::Json::parse(j.dump()));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].index, 12u);
  EXPECT_EQ(back[0].bulk_ids.value(), 0.38);
}

TEST(Svg, SingleSeries) {
  io::Series s{"x", {0, 1}, {0, 2}, io::Series::Style::Line};
  std::string svg = io::render_svg({io::Panel{{s}, {}}});
  EXPECT_EQ(count(svg, "<polyline"), 1u);
  EXPECT_NE(svg.find(">k</text>"), std::string::npos);
  EXPECT_NE(svg.find(">S(k)</text>"), std::string::npos);
  EXPECT_EQ(svg, io::render_svg({io::Panel{{s}, {}}}));
  EXPECT_THROW(io::render_svg({}), Error);
  EXPECT_THROW(io::render_svg({io::Panel{}}), Error);
}

TEST(Svg, PeriodicPeakMarkers) {
  AtomChain c = positions_from_word(std::string(64, 'a'), {{'a', 1.0}});
  auto d = structure_factor_grid(c, 0, 4 * std::numbers::pi, 1025);
  auto m = io::peak_markers(d);
  ASSERT_EQ(m.x.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(m.x[i], 2 * std::numbers::pi * static_cast<double>(i), 1e-9);
  io::Series line{"S", d.k_values, d.S, io::Series::Style::Line};
  std::string svg = io::render_svg({io::Panel{{line, m}, {}}});
  EXPECT_EQ(count(svg, "<line "), 3u);
}

TEST(Svg, WriteErrors) {
  io::Series s{"x", {0, 1}, {0, 2}, io::Series::Style::Line};
  try {
    io::emit_svg({s}, {}, "/nonexistent-dir/plot.svg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
  const fs::path p = scratch("plot.svg");
  io::emit_svg({s}, {"x", "y", "t", false}, p.string());
  EXPECT_TRUE(fs::exists(p));
}

TEST(Cli, GenerateFibonacci) {
  auto r = cli("generate --family fibonacci --order 10");
  ASSERT_EQ(r.code, 0);
  auto j = io::Json::parse(r.out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["length"], 144);
  EXPECT_EQ(j["word"].get<std::string>().size(), 144u);
  EXPECT_EQ(j["class"]["common_unimodular"], true);
}

TEST(Cli, CohomologyThueMorse) {
  auto r = cli("cohomology --family thue-morse");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(io::Json::parse(r.out)["H1"], "Z ⊕ Z[1/2]");
}

TEST(Cli, DiffractPeriodicComb) {
  auto r = cli("diffract --family periodic --order 8 --kmax 12.566");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,S");
  double best = 0, best_k = -1;
  std::size_t n = 256;
  while (std::getline(in, line)) {
    auto comma = line.find(',');
    double k = std::stod(line.substr(0, comma)), s = std::stod(line.substr(comma + 1));
    if (s > best) {
      best = s;
      best_k = k;
    }
    if (s / n > 0.999) { EXPECT_NEAR(std::remainder(k, 2 * std::numbers::pi), 0, 1e-3) << k; }
  }
  EXPECT_NEAR(best / n, 1, 1e-12);
  EXPECT_EQ(best_k, 0);
}

TEST(Cli, RoundTrips) {
  const std::string levels = scratch("levels.csv").string(), gaps = scratch("gaps.json").string();
  ASSERT_EQ(cli("spectrum --family fibonacci --order 11 --out " + levels).code, 0);
  auto from_file = cli("gaps --family fibonacci --order 11 --spectrum-file " + levels);
  auto direct = cli("gaps --family fibonacci --order 11 --out " + gaps);
  ASSERT_EQ(from_file.code, 0);
  ASSERT_EQ(direct.code, 0);
  std::ifstream in(gaps);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(from_file.out, ss.str());
  auto b1 = cli("bloch --family fibonacci --order 11 --gaps-file " + gaps);
  auto b2 = cli("bloch --family fibonacci --order 11 --spectrum-file " + levels);
  ASSERT_EQ(b1.code, 0);
  ASSERT_EQ(b2.code, 0);
  auto j1 = io::Json::parse(b1.out), j2 = io::Json::parse(b2.out);
  ASSERT_EQ(j1["gap_labels"].size(), j2["gap_labels"].size());
  for (std::size_t i = 0; i < j1["gap_labels"].size(); ++i) {
    EXPECT_EQ(j1["gap_labels"][i]["index"], j2["gap_labels"][i]["index"]);
    EXPECT_EQ(j1["gap_labels"][i]["label"]["coordinates"], j2["gap_labels"][i]["label"]["coordinates"]);
  }
  EXPECT_EQ(j1["verdicts"]["gaps_in_trace_group"], true);
}

TEST(Cli, RuleFile) {
  const fs::path rule = scratch("rule.json");
  std::ofstream(rule) << R"({"name":"silver","alphabet":["a","b"],"images":{"a":"aab","b":"a"}})";
  auto r = cli("trace --rule-file " + rule.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(io::Json::parse(r.out)["trace_group"]["kind"], "TwoGen");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("generate").code, 2);
  EXPECT_EQ(cli("generate --family fibonacci --rule-file x.json").code, 2);
  EXPECT_EQ(cli("generate --family nope").code, 2);
  EXPECT_EQ(cli("spectrum --family fibonacci --model magnetic").code, 2);
  EXPECT_EQ(cli("generate --family fibonacci --order 60").code, 1);
  EXPECT_EQ(cli("gaps --family fibonacci --order 2").code, 1);
  EXPECT_EQ(cli("trace --rule-file /nonexistent.json").code, 1);
}

TEST(Cli, LengthCapFromEnvironment) {
  auto r = cli("generate --family thue-morse --order 12");
  ASSERT_EQ(r.code, 0);
  const fs::path out = scratch("cap.txt");
  int status = std::system(("APERIODIX_LENGTH_CAP=1000 " + std::string(APERIODIX_CLI) +
                            " generate --family thue-morse --order 12 > " + out.string() + " 2>&1")
                               .c_str());
  EXPECT_EQ(WEXITSTATUS(status), 1);
}
