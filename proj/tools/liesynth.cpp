// Command-line front end: Lie algebra closures, control-basis conditioning,
// pulse-schedule synthesis and verification for the coupled two-spin system.

#include <CLI11.hpp>
#include <iostream>

#include "liesynth/io_json.hpp"
#include "liesynth/pulse_synth.hpp"

using namespace liesynth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

Mat4 named_target(const std::string& name) {
  const auto& q = QuaternionBasis::instance();
  if (name == "jxi") return kron2(q.j, q.i);
  if (name == "identity") return Mat4::Identity();
  throw ValidationError("unknown target preset: " + name);
}

Mat4 load_target(const std::string& spec) {
  if (spec == "jxi" || spec == "identity") return named_target(spec);
  return read_matrix_file(spec);
}

std::vector<AlgebraElement> closure_generators(const std::string& dirs,
                                               const std::string& gammas) {
  PhysicalConstants c;
  if (gammas == "equal")
    c.gamma_e_MHz_per_T = c.gamma_n_MHz_per_T;
  else if (gammas != "unequal")
    throw ValidationError("--gammas must be 'unequal' or 'equal'");
  const GeneratorSet g = make_generators(c);

  std::vector<AlgebraElement> gens;
  for (char d : dirs) {
    Mat4 m;
    switch (d) {
      case 'x': m = g.XU + g.KU; break;
      case 'y': m = g.YU + g.KU; break;
      case 'z': m = g.ZU + g.KU; break;
      default: throw ValidationError("--dirs must be a subset of xyz");
    }
    gens.push_back(make_element(m, std::string(1, d)));
  }
  if (gens.empty()) throw ValidationError("--dirs must name at least one direction");
  gens.push_back(make_element(g.KU, "K"));
  return gens;
}

struct CommonFlags {
  std::string constants_path;
  std::string output_path;
  std::uint64_t seed = 0;
  bool no_timestamp = false;
};

PhysicalConstants constants_from(const CommonFlags& f) {
  return f.constants_path.empty() ? PhysicalConstants{}
                                  : PhysicalConstants::load(f.constants_path);
}

void print_schedule_summary(const PulseSchedule& s) {
  std::cout << "n = " << s.n << "\n"
            << "per-cycle stages = " << s.per_cycle_stages << "\n"
            << "total stages = " << s.stages.size() << "\n"
            << "rms error = " << s.rms_error << "\n"
            << "total time = " << s.total_time_ns << " ns (gross "
            << s.gross_time_ns << " ns)\n"
            << "cap violations = " << s.cap_violations.size() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lie-algebraic magnetic-pulse synthesis for a coupled two-spin system"};
  app.require_subcommand(1);

  CommonFlags flags;
  app.add_option("--constants", flags.constants_path, "physical constants file (key=value)");
  app.add_option("--seed", flags.seed, "random seed (default 0)");
  app.add_flag("--no-timestamp", flags.no_timestamp, "omit timestamps from JSON output");

  // closure
  auto* cmd_closure = app.add_subcommand("closure", "smallest Lie algebra from field generators");
  std::string dirs = "xyz", gammas = "unequal";
  double closure_tol = 1e-9;
  bool track = true;
  cmd_closure->add_option("--dirs", dirs, "field directions, subset of xyz");
  cmd_closure->add_option("--gammas", gammas, "'unequal' (physical) or 'equal'");
  cmd_closure->add_option("--tol", closure_tol, "independence tolerance");
  cmd_closure->add_flag("!--no-recipes", track, "skip realizability recipes");
  cmd_closure->add_option("--out", flags.output_path, "basis JSON output path");

  // optimize-basis
  auto* cmd_opt = app.add_subcommand("optimize-basis", "hill-climb the control constants");
  std::string params_path;
  int max_passes = 40;
  cmd_opt->add_option("--params", params_path, "initial constants JSON (default: published values)");
  cmd_opt->add_option("--max-passes", max_passes, "hill-climbing passes");
  cmd_opt->add_option("--out", flags.output_path, "optimized constants JSON output");

  // synthesize
  auto* cmd_synth = app.add_subcommand("synthesize", "decompose a target unitary into pulses");
  std::string target_spec = "jxi", synth_params;
  double wn_dt = 1e-3, wn_eps = 0.1;
  bool no_merge = false, forbid_signed = false, forward_search = false;
  cmd_synth->add_option("--target", target_spec, "preset (jxi, identity) or matrix file");
  cmd_synth->add_option("--params", synth_params, "control constants JSON");
  cmd_synth->add_option("--wn-dt", wn_dt, "Wei-Norman grid step (default 0.001)");
  cmd_synth->add_option("--wn-eps", wn_eps, "determinant breakdown threshold (default 0.1)");
  cmd_synth->add_flag("--no-merge", no_merge, "keep adjacent equal-field stages separate");
  cmd_synth->add_flag("!--allow-signed", forbid_signed,
                      "fail instead of flagging signed field stages");
  cmd_synth->add_flag("--forward-search", forward_search,
                      "search forward-time equivalents for signed field stages");
  cmd_synth->add_option("--out", flags.output_path, "schedule JSON output");

  // verify
  auto* cmd_verify = app.add_subcommand("verify", "re-simulate a schedule against a target");
  std::string verify_schedule, verify_target = "jxi";
  double verify_tol = 1e-8;
  cmd_verify->add_option("--schedule", verify_schedule, "schedule JSON")->required();
  cmd_verify->add_option("--target", verify_target, "preset or matrix file");
  cmd_verify->add_option("--tol", verify_tol, "rms tolerance");

  // demo-paper
  auto* cmd_demo = app.add_subcommand("demo-paper", "run the published worked example");
  std::string demo_out_dir;
  cmd_demo->add_option("--out-dir", demo_out_dir, "directory for schedule/trace artifacts");

  CLI11_PARSE(app, argc, argv);
  const JsonOptions jopt{!flags.no_timestamp};

  try {
    if (*cmd_closure) {
      auto gens = closure_generators(dirs, gammas);
      ClosureOptions opt;
      opt.tol = closure_tol;
      opt.track_recipes = track;
      opt.seed = flags.seed;
      const ClosureResult result = closure(gens, opt);
      std::cout << "dimension = " << result.dim << "\n";
      if (!flags.output_path.empty())
        write_basis_json(result, gens, flags.output_path, jopt);
      return kExitOk;
    }

    if (*cmd_opt) {
      const GeneratorSet gens = make_generators(constants_from(flags));
      const ControlParams initial =
          params_path.empty() ? ControlParams{} : read_params_json(params_path);
      OptimizeOptions opt;
      opt.max_passes = max_passes;
      opt.seed = flags.seed;
      const ControlParams best = optimize_params(gens, initial, opt);
      const ControlBasis before = build_control_basis(gens, initial);
      const ControlBasis after = build_control_basis(gens, best);
      std::cout << "cond: " << before.cond << " -> " << after.cond << "\n"
                << "sigma_max = " << after.sigma_max
                << ", sigma_min = " << after.sigma_min << "\n";
      if (!flags.output_path.empty()) write_params_json(best, flags.output_path, jopt);
      return kExitOk;
    }

    if (*cmd_synth) {
      const GeneratorSet gens = make_generators(constants_from(flags));
      const ControlParams params =
          synth_params.empty() ? ControlParams{} : read_params_json(synth_params);
      const ControlBasis basis = build_control_basis(gens, params);
      SynthOptions opt;
      opt.wn.dt = wn_dt;
      opt.wn.det_threshold = wn_eps;
      opt.merge_stages = !no_merge;
      opt.allow_signed = !forbid_signed;
      opt.forward_search = forward_search;
      const PulseSchedule sched = synthesize(load_target(target_spec), basis, opt);
      print_schedule_summary(sched);
      if (!flags.output_path.empty()) write_schedule_json(sched, flags.output_path, jopt);
      return kExitOk;
    }

    if (*cmd_verify) {
      const GeneratorSet gens = make_generators(constants_from(flags));
      const PulseSchedule sched = read_schedule_json(verify_schedule);
      Mat4 target = load_target(verify_target);
      target /= std::pow(target.determinant(), 0.25);
      const SimulationResult sim = simulate(sched, gens);
      const double rms = rms_distance(sim.net, target);
      std::cout << "rms = " << rms << (rms <= verify_tol ? "  PASS" : "  FAIL") << "\n";
      return rms <= verify_tol ? kExitOk : kExitNumeric;
    }

    if (*cmd_demo) {
      const PhysicalConstants constants = constants_from(flags);
      const GeneratorSet gens = make_generators(constants);
      const ControlBasis basis = build_control_basis(gens, ControlParams{});
      std::cout << "control basis: sigma_max = " << basis.sigma_max
                << ", sigma_min = " << basis.sigma_min << ", cond = " << basis.cond
                << "\n";

      const Mat4 target = named_target("jxi");
      const Mat4 L = mat_log_unitary(target);
      const Components comp = components_in_basis(L, basis);
      std::cout << "components x = [";
      for (int j = 0; j < 15; ++j) std::cout << (j ? ", " : "") << comp.x(j);
      std::cout << "]\n";

      WeiNormanProblem problem(basis.algebra_elements(), comp.x);
      const WnResult wn = find_coordinates(problem);
      std::cout << "first-pass breakdown at t* = "
                << (wn.first_pass.breakdown_time ? *wn.first_pass.breakdown_time : 1.0)
                << ", split order n = " << wn.n << "\n";
      std::cout << "coordinates h = [";
      for (int j = 0; j < 15; ++j) std::cout << (j ? ", " : "") << wn.tau(j);
      std::cout << "]\n";

      const PulseSchedule sched = synthesize(target, basis, {});
      print_schedule_summary(sched);
      if (!demo_out_dir.empty()) {
        write_schedule_json(sched, demo_out_dir + "/schedule_jxi.json", jopt);
        write_trace_csv(wn.final_pass, demo_out_dir + "/wn_trace_jxi.csv");
        Vec4c psi0;
        psi0 << 0, 1, 0, 0;
        const SimulationResult sim = simulate(sched, gens, psi0);
        write_de_trace_csv(sim.de_trace, demo_out_dir + "/de_trace_jxi.csv");
      }
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
