#pragma once

// Scenario files: INI-style sections of `key = value` lines, `#` comments.
//
//   [setup]  za_mm zaimg_mm f_mm zb_mm zbo_mm zbs_mm Fb_mm lambda_um sigma_mm
//   [object] type = slit|double_slit|letter_e|file, width_mm, separation_mm,
//            path, center_mm (slit offset, optional)
//   [sensor] pixel_um na nb
//   [run]    mode = ghost|misfocus|refocus|viewpoint|dof|sweep,
//            path = oracle|fast (default fast), rho_b_mm (comma list),
//            alpha_list (comma list), out_prefix (default "cpi")
//   [grid]   optional overrides: dim, a_pitch_um, a_count, b_pitch_um,
//            b_count, o_pitch_um, o_count, oversample
//
// Values are kept in the units written in the file so that serialization
// round-trips exactly; conversion to millimeters happens in the accessors.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cpi/analysis.hpp"
#include "cpi/evaluator.hpp"
#include "cpi/geometry.hpp"
#include "cpi/grid.hpp"
#include "cpi/scene.hpp"

namespace cpi {

struct SetupSpec {
  double za_mm = 0.0;
  double zaimg_mm = 0.0;
  double f_mm = 0.0;
  double zb_mm = 0.0;
  double zbo_mm = 0.0;
  double zbs_mm = 0.0;
  double Fb_mm = 0.0;
  double lambda_um = 0.0;
  double sigma_mm = 0.0;

  OpticalSetup optical() const;
  friend bool operator==(const SetupSpec&, const SetupSpec&) = default;
};

enum class ObjectType { slit, double_slit, letter_e, file };

struct ObjectSpec {
  ObjectType type = ObjectType::slit;
  double width_mm = 0.0;
  double separation_mm = 0.0;
  double center_mm = 0.0;
  std::string path;
  friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

struct SensorSpecText {
  double pixel_um = 0.0;
  int na = 0;
  int nb = 0;

  SensorSpec sensor() const { return {pixel_um * 1e-3, na, nb}; }
  friend bool operator==(const SensorSpecText&, const SensorSpecText&) = default;
};

enum class RunMode { ghost, misfocus, refocus, viewpoint, dof, sweep };

struct RunSpec {
  RunMode mode = RunMode::ghost;
  EvalPath path = EvalPath::fast;
  std::vector<double> rho_b_mm;
  std::vector<double> alpha_list;
  std::string out_prefix = "cpi";
  friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

// Zero means "use the documented default".
struct GridSpec {
  int dim = 0;
  double a_pitch_um = 0.0;
  int a_count = 0;
  double b_pitch_um = 0.0;
  int b_count = 0;
  double o_pitch_um = 0.0;
  int o_count = 0;
  int oversample = 0;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct Scenario {
  SetupSpec setup;
  ObjectSpec object;
  SensorSpecText sensor;
  RunSpec run;
  GridSpec grid;
  // Directory against which a relative mask path is resolved.
  std::filesystem::path base_dir;

  void validate() const;
  // Equality ignores base_dir, which is not part of the document.
  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.setup == b.setup && a.object == b.object && a.sensor == b.sensor && a.run == b.run && a.grid == b.grid;
  }
};

std::string to_string(RunMode mode);
std::string to_string(ObjectType type);
std::string to_string(EvalPath path);
RunMode parse_run_mode(std::string_view text);
EvalPath parse_eval_path(std::string_view text);

// Throws ParseError (line, key) for malformed documents and ValidationError
// for documents that parse but violate an invariant.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
// Canonical text; parse_scenario(serialize(s)) == s.
std::string serialize(const Scenario& scenario);
// FNV-1a 64-bit digest of the canonical text.
std::uint64_t scenario_hash(const Scenario& scenario);
std::string hash_hex(std::uint64_t hash);

// Built-in scenarios matching the bundled files: fig3, fig4, fig5, dof.
bool is_preset(std::string_view name);
std::string preset_text(std::string_view name);
Scenario preset(std::string_view name);

// Sampling resolved from a scenario and its defaults.
struct ResolvedGrids {
  SampledGrid a;
  SampledGrid b;
  ApertureMask mask;
  QuadratureSpec quad;
};
ResolvedGrids resolve_grids(const Scenario& scenario);

}  // namespace cpi
