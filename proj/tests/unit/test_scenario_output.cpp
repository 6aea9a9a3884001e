#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "cpi/errors.hpp"
#include "cpi/output.hpp"
#include "cpi/runner.hpp"
#include "cpi/scenario.hpp"

using namespace cpi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cpi_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSmall = R"([setup]
za_mm = 10
zaimg_mm = 30
f_mm = 12
zb_mm = 10
zbo_mm = 35
zbs_mm = 36
Fb_mm = 20
lambda_um = 1
sigma_mm = 0.6

[object]
type = slit
width_mm = 0.026

[sensor]
pixel_um = 6
na = 300
nb = 320

[run]
mode = sweep
alpha_list = 0.95, 1
out_prefix = small

[grid]
a_pitch_um = 4
a_count = 41
b_pitch_um = 40
b_count = 61
o_pitch_um = 2
o_count = 33
)";

std::string with_line(std::string text, const std::string& after, const std::string& line) {
  const auto pos = text.find(after);
  REQUIRE(pos != std::string::npos);
  text.insert(pos + after.size(), line);
  return text;
}

}  // namespace

TEST_CASE("bundled scenarios match the built-in presets") {
  for (const char* name : {"fig3", "fig4", "fig5", "dof"}) {
    CAPTURE(name);
    CHECK(is_preset(name));
    const Scenario p = preset(name);
    CHECK_NOTHROW(p.validate());
    const Scenario file = load_scenario(fs::path(CPI_SCENARIO_DIR) / (std::string(name) + ".scn"));
    CHECK(file == p);
    CHECK(parse_scenario(serialize(p)) == p);
    CHECK(serialize(parse_scenario(serialize(p))) == serialize(p));
    CHECK(scenario_hash(file) == scenario_hash(p));
  }
  CHECK_FALSE(is_preset("fig6"));
  CHECK_THROWS_AS(preset("fig6"), ValidationError);
  const Scenario fig3 = preset("fig3");
  CHECK(fig3.object.type == ObjectType::letter_e);
  CHECK(fig3.setup.zb_mm == 3.0);
  CHECK(fig3.run.mode == RunMode::refocus);
  CHECK(preset("fig5").run.rho_b_mm == std::vector<double>{-0.48, 0.48});
}

TEST_CASE("scenario parsing is strict") {
  const Scenario small = parse_scenario(kSmall);
  CHECK(small.run.alpha_list == std::vector<double>{0.95, 1.0});
  CHECK(small.run.path == EvalPath::fast);
  CHECK(parse_scenario(serialize(small)) == small);

  CHECK_THROWS_AS(parse_scenario(""), ParseError);
  try {
    parse_scenario(with_line(kSmall, "width_mm = 0.026\n", "colour = red\n"));
    FAIL("unknown key accepted");
  } catch (const ParseError& e) {
    CHECK(e.key() == "object.colour");
    CHECK(e.line() == 15);
  }
  CHECK_THROWS_AS(parse_scenario(with_line(kSmall, "[run]\n", "mode = ghost\n")), ParseError);
  CHECK_THROWS_AS(parse_scenario(with_line(kSmall, "o_count = 33\n", "[extra]\n")), ParseError);
  CHECK_THROWS_AS(parse_scenario(with_line(kSmall, "[sensor]\n", "pixel_um = 6x\n")), ParseError);
  std::string no_setup = kSmall;
  no_setup.replace(0, no_setup.find("[object]"), "");
  try {
    parse_scenario(no_setup);
    FAIL("missing section accepted");
  } catch (const ParseError& e) {
    CHECK(e.key() == "setup");
  }

  std::string negative = kSmall;
  negative.replace(negative.find("zb_mm = 10"), 10, "zb_mm = -1");
  CHECK_THROWS_AS(parse_scenario(negative), ValidationError);
  std::string unfocused = kSmall;
  unfocused.replace(unfocused.find("Fb_mm = 20"), 10, "Fb_mm = 21");
  CHECK_THROWS_AS(parse_scenario(unfocused), ValidationError);
  std::string bad_mode = kSmall;
  bad_mode.replace(bad_mode.find("mode = sweep"), 12, "mode = scan");
  CHECK_THROWS_AS(parse_scenario(bad_mode), ValidationError);
}

TEST_CASE("scenario hash follows the content") {
  const Scenario a = parse_scenario(kSmall);
  Scenario b = a;
  CHECK(scenario_hash(a) == scenario_hash(b));
  b.run.out_prefix = "other";
  CHECK(scenario_hash(a) != scenario_hash(b));
  CHECK(hash_hex(scenario_hash(a)).size() == 16);
  CHECK(hash_hex(0xabcULL) == "0000000000000abc");
}

TEST_CASE("mask files resolve relative to the scenario") {
  const fs::path dir = scratch("mask");
  {
    std::ofstream m(dir / "bars.txt");
    m << "1 8 0.01\n0 1 1 0 0 1 1 0\n";
  }
  std::string text = kSmall;
  text.replace(text.find("type = slit\nwidth_mm = 0.026\n"), 29, "type = file\npath = bars.txt\n");
  text.replace(text.find("o_pitch_um = 2\no_count = 33\n"), 28, "");
  {
    std::ofstream s(dir / "custom.scn");
    s << text;
  }
  const Scenario sc = load_scenario(dir / "custom.scn");
  CHECK(sc.object.type == ObjectType::file);
  const ResolvedGrids g = resolve_grids(sc);
  CHECK(g.mask.grid().count() == 8);
  CHECK(g.mask.grid().pitch() == 0.01);
  CHECK(g.mask.open_area() == doctest::Approx(0.04));
  Scenario missing = sc;
  missing.object.path = "nowhere.txt";
  CHECK_THROWS_AS(resolve_grids(missing), Error);
}

TEST_CASE("graymap encoding") {
  const SampledGrid line = SampledGrid::line(0.1, 4);
  const std::string zero = encode_pgm(Image(line, {0, 0, 0, 0}));
  CHECK(zero == std::string("P5\n4 1\n65535\n") + std::string(8, '\0'));
  const std::string bytes = encode_pgm(Image(line, {0.0, 1.0, 0.5, 1.0 / 65535}));
  const std::string payload = bytes.substr(bytes.size() - 8);
  CHECK(payload == std::string("\x00\x00\xff\xff\x80\x00\x00\x01", 8));
  CHECK_THROWS_AS(encode_pgm(Image(line, {0, 2, 0, 0})), ValidationError);

  // Rows run from the largest y downward.
  const SampledGrid sq = SampledGrid::square(0.1, 2);
  const std::string img = encode_pgm(Image(sq, {0.0, 0.0, 1.0, 0.0}));
  CHECK(img.substr(img.size() - 8) == std::string("\xff\xff\x00\x00\x00\x00\x00\x00", 8));

  const fs::path dir = scratch("pgm");
  Image peak(line, {0.2, 1.0, 0.4, 0.0}, "probe");
  peak.normalization = Normalization::peak;
  peak.warnings.push_back("TruncatedEnvelope: test");
  write_image(peak, dir / "probe.pgm", "00000000deadbeef");
  CHECK(slurp(dir / "probe.pgm") == encode_pgm(peak));
  const std::string side = slurp(dir / "probe.txt");
  CHECK(side.find("scenario_hash: 00000000deadbeef") != std::string::npos);
  CHECK(side.find("normalization: peak") != std::string::npos);
  CHECK(side.find("pitch_mm: 0.1") != std::string::npos);
  CHECK(side.find("warning: TruncatedEnvelope") != std::string::npos);
}

TEST_CASE("profile files") {
  const SampledGrid g = SampledGrid::line(0.0125, 5, 0.3);
  const Image img(g, {0.1, 0.123456789123, 1.0, 1e-12, 0.0});
  const std::string text = encode_profile(img);
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.rfind("rho_a_mm,intensity\n", 0) == 0);
  const fs::path dir = scratch("csv");
  write_profile(img, dir / "p.csv");
  const auto rows = read_profile(dir / "p.csv");
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(rows[i].first == doctest::Approx(g.coordinate(0, static_cast<int>(i))).epsilon(1e-9));
    CHECK(rows[i].second == doctest::Approx(img.values[i]).epsilon(1e-9));
  }
  CHECK_THROWS_AS(encode_profile(Image(SampledGrid::square(0.1, 2), {0, 0, 0, 0})), ValidationError);
}

TEST_CASE("runner modes") {
  const fs::path dir = scratch("run");
  const RunResult sweep = run_scenario(parse_scenario(kSmall), {dir, 1, {}, {}});
  for (const char* name : {"small_a0.95_coherent.csv", "small_a0.95_incoherent.csv", "small_a1_coherent.csv",
                           "small_a1_incoherent.csv"})
    CHECK(fs::exists(dir / name));
  CHECK(sweep.artifacts.size() == 4);
  const auto focus = read_profile(dir / "small_a1_incoherent.csv");
  CHECK(focus[20].second == doctest::Approx(1.0));

  const RunResult ghost = run_scenario(parse_scenario(kSmall), {dir, 2, {}, RunMode::ghost});
  CHECK(fs::exists(dir / "small_focused.pgm"));
  CHECK(fs::exists(dir / "small_focused.txt"));
  CHECK(fs::exists(dir / "small_focused_peak.csv"));
  CHECK(fs::exists(dir / "small_focused_center.csv"));
  CHECK(slurp(dir / "small_focused.pgm").find("\xff\xff") != std::string::npos);
  CHECK(ghost.report.empty());

  const RunResult dof = run_scenario(preset("fig3"), {dir, 1, {}, RunMode::dof});
  CHECK(fs::exists(dir / "fig3_dof.txt"));
  CHECK(dof.report.find("0.26") != std::string::npos);
  CHECK(dof.report.find(" 18") != std::string::npos);
  CHECK(dof.report.find("delta*N_u") != std::string::npos);
  CHECK(dof.report.find("2*delta*N_u") != std::string::npos);

  Scenario two_d = preset("fig3");
  two_d.run.alpha_list = {1.0};
  CHECK_THROWS_AS(run_scenario(two_d, {dir, 1, {}, RunMode::sweep}), ValidationError);
}
