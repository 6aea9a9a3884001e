#include "cpi/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "cpi/errors.hpp"

namespace cpi {

OpticalSetup SetupSpec::optical() const {
  OpticalSetup s;
  s.z_a = za_mm;
  s.z_a_img = zaimg_mm;
  s.f = f_mm;
  s.z_b = zb_mm;
  s.z_b_obj_lens = zbo_mm;
  s.z_b_lens_sens = zbs_mm;
  s.F_b = Fb_mm;
  s.lambda = lambda_um * 1e-3;
  s.sigma = sigma_mm;
  return s;
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::ghost: return "ghost";
    case RunMode::misfocus: return "misfocus";
    case RunMode::refocus: return "refocus";
    case RunMode::viewpoint: return "viewpoint";
    case RunMode::dof: return "dof";
    case RunMode::sweep: return "sweep";
  }
  return "ghost";
}

std::string to_string(ObjectType type) {
  switch (type) {
    case ObjectType::slit: return "slit";
    case ObjectType::double_slit: return "double_slit";
    case ObjectType::letter_e: return "letter_e";
    case ObjectType::file: return "file";
  }
  return "slit";
}

std::string to_string(EvalPath path) { return path == EvalPath::oracle ? "oracle" : "fast"; }

RunMode parse_run_mode(std::string_view text) {
  for (RunMode m : {RunMode::ghost, RunMode::misfocus, RunMode::refocus, RunMode::viewpoint, RunMode::dof, RunMode::sweep})
    if (text == to_string(m)) return m;
  throw ValidationError("unknown run mode '" + std::string(text) + "'");
}

EvalPath parse_eval_path(std::string_view text) {
  if (text == "oracle") return EvalPath::oracle;
  if (text == "fast") return EvalPath::fast;
  throw ValidationError("unknown evaluation path '" + std::string(text) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

double to_double(const Entry& e, const std::string& key) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) throw ParseError(e.line, key, "expected a number");
  return v;
}

int to_int(const Entry& e, const std::string& key) {
  int v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError(e.line, key, "expected an integer");
  return v;
}

std::vector<double> to_list(const Entry& e, const std::string& key) {
  std::vector<double> out;
  std::string_view rest = e.value;
  while (true) {
    const auto comma = rest.find(',');
    const std::string item(trim(rest.substr(0, comma)));
    if (item.empty()) throw ParseError(e.line, key, "empty list item");
    out.push_back(to_double({item, e.line}, key));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

class Reader {
 public:
  Reader(std::map<std::string, Section>& sections, std::string name, int header_line)
      : sections_(sections), name_(std::move(name)), header_line_(header_line) {}

  bool present() const { return sections_.count(name_) != 0; }
  const Entry* find(const std::string& key) {
    auto s = sections_.find(name_);
    if (s == sections_.end()) return nullptr;
    auto it = s->second.find(key);
    if (it == s->second.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }
  const Entry& need(const std::string& key) {
    const Entry* e = find(key);
    if (!e) throw ParseError(header_line_, name_ + "." + key, "missing required key");
    return *e;
  }
  double number(const std::string& key) { return to_double(need(key), name_ + "." + key); }
  double number_or(const std::string& key, double fallback) {
    const Entry* e = find(key);
    return e ? to_double(*e, name_ + "." + key) : fallback;
  }
  int integer(const std::string& key) { return to_int(need(key), name_ + "." + key); }
  int integer_or(const std::string& key, int fallback) {
    const Entry* e = find(key);
    return e ? to_int(*e, name_ + "." + key) : fallback;
  }
  void reject_unknown() const {
    auto s = sections_.find(name_);
    if (s == sections_.end()) return;
    for (const auto& [key, entry] : s->second)
      if (!used_.count(key)) throw ParseError(entry.line, name_ + "." + key, "unknown key");
  }

 private:
  std::map<std::string, Section>& sections_;
  std::string name_;
  int header_line_;
  std::set<std::string> used_;
};

template <class Fn>
auto as_validation(const Entry& e, const std::string& key, Fn&& fn) {
  try {
    return fn(e.value);
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& err) {
    throw ParseError(e.line, key, err.what());
  }
}

std::string fmt(double v) {
  // Shortest text that reads back to the same double.
  char buf[40];
  for (int p = 1; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  std::map<std::string, Section> sections;
  std::map<std::string, int> header_lines;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "", "unterminated section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> known{"setup", "object", "sensor", "run", "grid"};
      if (!known.count(current)) throw ParseError(line_no, current, "unknown section");
      if (header_lines.count(current)) throw ParseError(line_no, current, "duplicate section");
      header_lines[current] = line_no;
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "", "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (current.empty()) throw ParseError(line_no, key, "key outside of a section");
    if (key.empty()) throw ParseError(line_no, "", "empty key");
    if (value.empty()) throw ParseError(line_no, current + "." + key, "empty value");
    if (!sections[current].emplace(key, Entry{value, line_no}).second)
      throw ParseError(line_no, current + "." + key, "duplicate key");
  }
  for (const char* required : {"setup", "object", "sensor", "run"})
    if (!sections.count(required)) throw ParseError(0, required, "missing section [" + std::string(required) + "]");

  Scenario sc;
  Reader setup(sections, "setup", header_lines["setup"]);
  sc.setup.za_mm = setup.number("za_mm");
  sc.setup.zaimg_mm = setup.number("zaimg_mm");
  sc.setup.f_mm = setup.number("f_mm");
  sc.setup.zb_mm = setup.number("zb_mm");
  sc.setup.zbo_mm = setup.number("zbo_mm");
  sc.setup.zbs_mm = setup.number("zbs_mm");
  sc.setup.Fb_mm = setup.number("Fb_mm");
  sc.setup.lambda_um = setup.number("lambda_um");
  sc.setup.sigma_mm = setup.number("sigma_mm");
  setup.reject_unknown();

  Reader object(sections, "object", header_lines["object"]);
  {
    const Entry& t = object.need("type");
    sc.object.type = as_validation(t, "object.type", [](const std::string& v) {
      for (ObjectType o : {ObjectType::slit, ObjectType::double_slit, ObjectType::letter_e, ObjectType::file})
        if (v == to_string(o)) return o;
      throw ValidationError("unknown object type '" + v + "'");
    });
  }
  if (sc.object.type == ObjectType::file) {
    sc.object.path = object.need("path").value;
  } else {
    sc.object.width_mm = object.number("width_mm");
    if (sc.object.type == ObjectType::double_slit) sc.object.separation_mm = object.number("separation_mm");
    if (sc.object.type == ObjectType::slit) sc.object.center_mm = object.number_or("center_mm", 0.0);
  }
  object.reject_unknown();

  Reader sensor(sections, "sensor", header_lines["sensor"]);
  sc.sensor.pixel_um = sensor.number("pixel_um");
  sc.sensor.na = sensor.integer("na");
  sc.sensor.nb = sensor.integer("nb");
  sensor.reject_unknown();

  Reader run(sections, "run", header_lines["run"]);
  sc.run.mode = as_validation(run.need("mode"), "run.mode", [](const std::string& v) { return parse_run_mode(v); });
  if (const Entry* e = run.find("path"))
    sc.run.path = as_validation(*e, "run.path", [](const std::string& v) { return parse_eval_path(v); });
  if (const Entry* e = run.find("rho_b_mm")) sc.run.rho_b_mm = to_list(*e, "run.rho_b_mm");
  if (const Entry* e = run.find("alpha_list")) sc.run.alpha_list = to_list(*e, "run.alpha_list");
  if (const Entry* e = run.find("out_prefix")) sc.run.out_prefix = e->value;
  run.reject_unknown();

  Reader grid(sections, "grid", header_lines["grid"]);
  if (grid.present()) {
    sc.grid.dim = grid.integer_or("dim", 0);
    sc.grid.a_pitch_um = grid.number_or("a_pitch_um", 0.0);
    sc.grid.a_count = grid.integer_or("a_count", 0);
    sc.grid.b_pitch_um = grid.number_or("b_pitch_um", 0.0);
    sc.grid.b_count = grid.integer_or("b_count", 0);
    sc.grid.o_pitch_um = grid.number_or("o_pitch_um", 0.0);
    sc.grid.o_count = grid.integer_or("o_count", 0);
    sc.grid.oversample = grid.integer_or("oversample", 0);
    grid.reject_unknown();
  }

  sc.validate();
  return sc;
}

void Scenario::validate() const {
  setup.optical().validate();
  sensor.sensor().validate();
  if (object.type != ObjectType::file && !(object.width_mm > 0.0))
    throw ValidationError("object width must be positive");
  if (object.type == ObjectType::double_slit && !(object.separation_mm > object.width_mm))
    throw OverlapError("double-slit apertures touch or overlap");
  if (object.type == ObjectType::file && object.path.empty()) throw ValidationError("mask file path is empty");
  if (run.mode == RunMode::viewpoint && run.rho_b_mm.empty())
    throw ValidationError("viewpoint mode needs at least one rho_b_mm value");
  if (run.mode == RunMode::sweep && run.alpha_list.empty())
    throw ValidationError("sweep mode needs a non-empty alpha_list");
  for (double a : run.alpha_list)
    if (!(a > 0.0)) throw ValidationError("alpha values must be positive");
  if (run.out_prefix.empty() || run.out_prefix.find_first_of("/\\") != std::string::npos)
    throw ValidationError("out_prefix must be a plain file-name prefix");
  if (grid.dim < 0 || grid.dim > 2) throw ValidationError("grid dim must be 1 or 2");
  for (int c : {grid.a_count, grid.b_count, grid.o_count})
    if (c < 0 || c == 1) throw ValidationError("grid counts must be at least 2");
  for (double p : {grid.a_pitch_um, grid.b_pitch_um, grid.o_pitch_um})
    if (p < 0.0) throw ValidationError("grid pitches must be positive");
  if (grid.oversample < 0) throw ValidationError("oversample must be nonnegative");
  // Builds the mask so that rasterization limits are reported now.
  if (object.type != ObjectType::file) resolve_grids(*this);
  if (run.mode == RunMode::sweep) {
    const OpticalSetup s = setup.optical();
    for (double a : run.alpha_list) s.with_object_distance(object_distance_for_alpha(s, a));
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open scenario file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  Scenario sc = parse_scenario(text.str());
  sc.base_dir = path.parent_path();
  return sc;
}

std::string serialize(const Scenario& sc) {
  std::ostringstream o;
  o << "[setup]\n";
  o << "za_mm = " << fmt(sc.setup.za_mm) << '\n';
  o << "zaimg_mm = " << fmt(sc.setup.zaimg_mm) << '\n';
  o << "f_mm = " << fmt(sc.setup.f_mm) << '\n';
  o << "zb_mm = " << fmt(sc.setup.zb_mm) << '\n';
  o << "zbo_mm = " << fmt(sc.setup.zbo_mm) << '\n';
  o << "zbs_mm = " << fmt(sc.setup.zbs_mm) << '\n';
  o << "Fb_mm = " << fmt(sc.setup.Fb_mm) << '\n';
  o << "lambda_um = " << fmt(sc.setup.lambda_um) << '\n';
  o << "sigma_mm = " << fmt(sc.setup.sigma_mm) << '\n';
  o << "\n[object]\n";
  o << "type = " << to_string(sc.object.type) << '\n';
  if (sc.object.type == ObjectType::file) {
    o << "path = " << sc.object.path << '\n';
  } else {
    o << "width_mm = " << fmt(sc.object.width_mm) << '\n';
    if (sc.object.type == ObjectType::double_slit) o << "separation_mm = " << fmt(sc.object.separation_mm) << '\n';
    if (sc.object.type == ObjectType::slit && sc.object.center_mm != 0.0)
      o << "center_mm = " << fmt(sc.object.center_mm) << '\n';
  }
  o << "\n[sensor]\n";
  o << "pixel_um = " << fmt(sc.sensor.pixel_um) << '\n';
  o << "na = " << sc.sensor.na << '\n';
  o << "nb = " << sc.sensor.nb << '\n';
  o << "\n[run]\n";
  o << "mode = " << to_string(sc.run.mode) << '\n';
  o << "path = " << to_string(sc.run.path) << '\n';
  if (!sc.run.rho_b_mm.empty()) o << "rho_b_mm = " << fmt_list(sc.run.rho_b_mm) << '\n';
  if (!sc.run.alpha_list.empty()) o << "alpha_list = " << fmt_list(sc.run.alpha_list) << '\n';
  o << "out_prefix = " << sc.run.out_prefix << '\n';
  if (!(sc.grid == GridSpec{})) {
    o << "\n[grid]\n";
    if (sc.grid.dim) o << "dim = " << sc.grid.dim << '\n';
    if (sc.grid.a_pitch_um > 0.0) o << "a_pitch_um = " << fmt(sc.grid.a_pitch_um) << '\n';
    if (sc.grid.a_count) o << "a_count = " << sc.grid.a_count << '\n';
    if (sc.grid.b_pitch_um > 0.0) o << "b_pitch_um = " << fmt(sc.grid.b_pitch_um) << '\n';
    if (sc.grid.b_count) o << "b_count = " << sc.grid.b_count << '\n';
    if (sc.grid.o_pitch_um > 0.0) o << "o_pitch_um = " << fmt(sc.grid.o_pitch_um) << '\n';
    if (sc.grid.o_count) o << "o_count = " << sc.grid.o_count << '\n';
    if (sc.grid.oversample) o << "oversample = " << sc.grid.oversample << '\n';
  }
  return o.str();
}

std::uint64_t scenario_hash(const Scenario& sc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize(sc)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

constexpr const char* kBench = R"([setup]
za_mm = 10
zaimg_mm = 30
f_mm = 12
zb_mm = 3
zbo_mm = 42
zbs_mm = 36
Fb_mm = 20
lambda_um = 1
sigma_mm = 0.6
)";

constexpr const char* kFig3 = R"(
[object]
type = letter_e
width_mm = 0.2

[sensor]
pixel_um = 6
na = 300
nb = 320

[run]
mode = refocus
path = fast
out_prefix = fig3

# Reduced 96x96 sensor grids; rho_b spans +-3 M sigma.
[grid]
dim = 2
a_pitch_um = 24
a_count = 96
b_pitch_um = 30
b_count = 96
o_pitch_um = 50
o_count = 32
)";

constexpr const char* kFig4 = R"([setup]
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
path = fast
alpha_list = 0.9, 0.95, 1, 1.05, 1.1
out_prefix = fig4

# Fine rho_a sampling resolves the 39 um focused image; rho_b spans +-3 M sigma.
[grid]
a_pitch_um = 1
a_count = 400
b_pitch_um = 6
b_count = 480
o_pitch_um = 2
o_count = 65
)";

constexpr const char* kFig5 = R"(
[object]
type = double_slit
width_mm = 0.2
separation_mm = 0.4

[sensor]
pixel_um = 6
na = 300
nb = 320

[run]
mode = viewpoint
path = fast
rho_b_mm = -0.48, 0.48
out_prefix = fig5

# The out-of-focus projections land up to 3.1 mm off axis.
[grid]
a_pitch_um = 10
a_count = 800
o_pitch_um = 25
o_count = 32
)";

constexpr const char* kDof = R"(
[object]
type = letter_e
width_mm = 0.2

[sensor]
pixel_um = 6
na = 300
nb = 320

[run]
mode = dof
out_prefix = dof
)";

}  // namespace

bool is_preset(std::string_view name) {
  return name == "fig3" || name == "fig4" || name == "fig5" || name == "dof";
}

std::string preset_text(std::string_view name) {
  if (name == "fig3") return std::string(kBench) + kFig3;
  if (name == "fig4") return kFig4;
  if (name == "fig5") return std::string(kBench) + kFig5;
  if (name == "dof") return std::string(kBench) + kDof;
  throw ValidationError("unknown preset '" + std::string(name) + "'");
}

Scenario preset(std::string_view name) { return parse_scenario(preset_text(name)); }

ResolvedGrids resolve_grids(const Scenario& sc) {
  const double pixel = sc.sensor.pixel_um * 1e-3;
  std::optional<ApertureMask> file_mask;
  int dim = sc.grid.dim;
  if (sc.object.type == ObjectType::file) {
    std::filesystem::path p = sc.object.path;
    if (p.is_relative() && !sc.base_dir.empty()) p = sc.base_dir / p;
    file_mask = load_mask_file(p);
    if (dim == 0) dim = file_mask->dim();
    if (dim != file_mask->dim()) throw ValidationError("grid dim does not match the mask file");
  }
  if (dim == 0) dim = sc.object.type == ObjectType::letter_e ? 2 : 1;
  if (sc.object.type == ObjectType::letter_e && dim != 2) throw ValidationError("letter E needs dim = 2");

  auto sensor_grid = [&](double pitch_um, int count, int sensor_count) {
    if (dim == 1)
      return SampledGrid::line(pitch_um > 0.0 ? pitch_um * 1e-3 : pixel, count > 0 ? count : sensor_count);
    const int n = count > 0 ? count : 96;
    const double pitch = pitch_um > 0.0 ? pitch_um * 1e-3 : pixel * sensor_count / n;
    return SampledGrid::square(pitch, n);
  };
  const SampledGrid a = sensor_grid(sc.grid.a_pitch_um, sc.grid.a_count, sc.sensor.na);
  const SampledGrid b = sensor_grid(sc.grid.b_pitch_um, sc.grid.b_count, sc.sensor.nb);

  QuadratureSpec quad;
  quad.object_oversample = sc.grid.oversample;
  if (file_mask) return {a, b, *file_mask, quad};

  const double w = sc.object.width_mm;
  const double pitch = sc.grid.o_pitch_um > 0.0 ? sc.grid.o_pitch_um * 1e-3 : w / 4.0;
  double reach = 0.0;
  switch (sc.object.type) {
    case ObjectType::slit: reach = std::abs(sc.object.center_mm) + 0.5 * w; break;
    case ObjectType::double_slit: reach = 0.5 * (sc.object.separation_mm + w); break;
    default: reach = 2.5 * w; break;
  }
  const int count = sc.grid.o_count > 0 ? sc.grid.o_count : 2 * static_cast<int>(std::ceil(reach / pitch - 1e-9)) + 4;
  const SampledGrid og(dim, pitch, count);
  switch (sc.object.type) {
    case ObjectType::slit: return {a, b, make_slit(w, og, sc.object.center_mm), quad};
    case ObjectType::double_slit: return {a, b, make_double_slit(w, sc.object.separation_mm, og), quad};
    default: return {a, b, make_letter_E(w, og), quad};
  }
}

}  // namespace cpi
