#include "cpi/runner.hpp"

#include <cstdio>
#include <fstream>

#include "cpi/analysis.hpp"
#include "cpi/errors.hpp"
#include "cpi/output.hpp"
#include "cpi/parallel.hpp"
#include "cpi/refocus.hpp"

namespace cpi {

namespace {

std::string number_tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class Emitter {
 public:
  Emitter(const std::filesystem::path& dir, std::string prefix, std::string hash, RunResult& result)
      : dir_(dir), prefix_(std::move(prefix)), hash_(std::move(hash)), result_(result) {}

  void image(const Image& img, const std::string& kind) {
    for (const auto& w : img.warnings) result_.warnings.push_back(kind + ": " + w);
    const Image peak = normalize(img, Normalization::peak);
    const auto pgm = dir_ / (prefix_ + "_" + kind + ".pgm");
    write_image(peak, pgm, hash_);
    result_.artifacts.push_back(pgm);
    if (img.grid.dim() != 1) return;
    profile(peak, prefix_ + "_" + kind + "_peak.csv");
    if (img.center_value() > 0.0) profile(normalize(img, Normalization::center), prefix_ + "_" + kind + "_center.csv");
  }

  void profile(const Image& img, const std::string& name) {
    write_profile(img, dir_ / name);
    result_.artifacts.push_back(dir_ / name);
  }

  void text(const std::string& body, const std::string& kind) {
    const auto p = dir_ / (prefix_ + "_" + kind + ".txt");
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + p.string() + " for writing");
    out << body << "scenario_hash: " << hash_ << '\n';
    result_.artifacts.push_back(p);
  }

  const std::string& prefix() const { return prefix_; }

 private:
  std::filesystem::path dir_;
  std::string prefix_;
  std::string hash_;
  RunResult& result_;
};

OpticalSetup focused(const OpticalSetup& setup) {
  if (is_at_focus(setup)) return setup;
  return setup.with_object_distance(solve_ghost_focus(setup.z_a, setup.z_a_img, setup.f));
}

}  // namespace

RunResult run_scenario(const Scenario& input, const RunOptions& options) {
  Scenario sc = input;
  if (options.path) sc.run.path = *options.path;
  if (options.mode) sc.run.mode = *options.mode;
  sc.validate();
  set_thread_count(options.threads);
  std::filesystem::create_directories(options.out_dir);

  RunResult result;
  Emitter emit(options.out_dir, sc.run.out_prefix, hash_hex(scenario_hash(sc)), result);
  const ResolvedGrids g = resolve_grids(sc);
  const OpticalSetup setup = sc.setup.optical();
  const PumpProfile pump = PumpProfile::gaussian(setup.sigma);
  const EvalPath path = sc.run.path;

  switch (sc.run.mode) {
    case RunMode::ghost:
      emit.image(unrefocused_image(g.mask, pump, focused(setup), g.a, g.b, path, g.quad), "focused");
      break;
    case RunMode::misfocus:
      emit.image(unrefocused_image(g.mask, pump, setup, g.a, g.b, path, g.quad), "misfocused");
      break;
    case RunMode::refocus:
      emit.image(unrefocused_image(g.mask, pump, focused(setup), g.a, g.b, path, g.quad), "focused");
      emit.image(unrefocused_image(g.mask, pump, setup, g.a, g.b, path, g.quad), "misfocused");
      emit.image(refocused_image(g.mask, pump, setup, g.a, g.b, path, g.quad), "refocused");
      break;
    case RunMode::viewpoint:
      for (double rb : sc.run.rho_b_mm)
        emit.image(viewpoint_image(g.mask, pump, setup, g.a, Vec2{rb, 0.0}, path, g.quad), "viewpoint_rb" + number_tag(rb));
      break;
    case RunMode::dof: {
      const DofReport r = compare_report(setup, pump, sc.sensor.sensor(), g.mask.smallest_feature());
      result.report = format_report(r);
      emit.text(result.report, "dof");
      break;
    }
    case RunMode::sweep:
      if (g.a.dim() != 1) throw ValidationError("sweep mode produces one-dimensional profiles");
      for (double alpha : sc.run.alpha_list) {
        const OpticalSetup s = setup.with_object_distance(object_distance_for_alpha(setup, alpha));
        const std::string tag = emit.prefix() + "_a" + number_tag(alpha);
        const Image coherent = viewpoint_image(g.mask, pump, s, g.a, Vec2{}, path, g.quad);
        const Image incoherent = unrefocused_image(g.mask, pump, s, g.a, g.b, path, g.quad);
        for (const auto& w : incoherent.warnings) result.warnings.push_back("alpha " + number_tag(alpha) + ": " + w);
        emit.profile(normalize(coherent, Normalization::center), tag + "_coherent.csv");
        emit.profile(normalize(incoherent, Normalization::center), tag + "_incoherent.csv");
      }
      break;
  }
  return result;
}

}  // namespace cpi
