#include "liesynth/pulse_synth.hpp"

#include <cmath>
#include <fstream>

namespace liesynth {

Mat4 PulseStage::unitary(const GeneratorSet& gens) const {
  const PhysicalConstants& c = gens.constants;
  const PulseSpec p{Bx_mT / c.B_unit_mT, By_mT / c.B_unit_mT, Bz_mT / c.B_unit_mT,
                    duration_ns / c.tau_unit_ns};
  return mat_exp(p.matrix(gens));
}

double rms_distance(const Mat4& A, const Mat4& B) {
  const Mat4 E = A - B;
  return std::sqrt((E.adjoint() * E).trace().real() / 16.0);
}

namespace {

PulseStage make_stage(const PulseSpec& p, double duration_units,
                      const PhysicalConstants& c) {
  PulseStage s;
  s.Bx_mT = p.Bx * c.B_unit_mT;
  s.By_mT = p.By * c.B_unit_mT;
  s.Bz_mT = p.Bz * c.B_unit_mT;
  s.duration_ns = duration_units * c.tau_unit_ns;
  s.kind = p.is_idle() ? PulseStage::Kind::Idle : PulseStage::Kind::Field;
  return s;
}

PulseSpec stage_spec(const PulseStage& s, const PhysicalConstants& c) {
  return {s.Bx_mT / c.B_unit_mT, s.By_mT / c.B_unit_mT, s.Bz_mT / c.B_unit_mT,
          s.duration_ns / c.tau_unit_ns};
}

bool same_field(const PulseStage& a, const PulseStage& b) {
  return a.kind == b.kind && a.Bx_mT == b.Bx_mT && a.By_mT == b.By_mT &&
         a.Bz_mT == b.Bz_mT;
}

}  // namespace

std::vector<PulseStage> expand_recipe(double h, const ControlElement& element,
                                      const PhysicalConstants& constants) {
  std::vector<PulseStage> stages;
  stages.reserve(2 * element.conjugators.size() + 1);
  for (const auto& conj : element.conjugators)
    stages.push_back(make_stage(conj, conj.tau, constants));
  stages.push_back(make_stage(element.core, h * element.core.tau, constants));
  for (auto it = element.conjugators.rbegin(); it != element.conjugators.rend(); ++it)
    stages.push_back(make_stage(*it, -it->tau, constants));
  return stages;
}

std::vector<PulseStage> realizability_pass(const std::vector<PulseStage>& stages,
                                           const GeneratorSet& gens,
                                           const SynthOptions& options) {
  const PhysicalConstants& c = gens.constants;
  const double tau_p = c.tau_period();
  std::vector<PulseStage> out;
  out.reserve(stages.size());
  for (PulseStage s : stages) {
    const double t_units = s.duration_ns / c.tau_unit_ns;
    if (t_units >= 0.0) {
      out.push_back(s);
      continue;
    }
    if (s.kind == PulseStage::Kind::Idle) {
      // exp(-KU t0) = exp(KU (m tau_p - t0)); pick the smallest positive m
      const int m = static_cast<int>(std::ceil(-t_units / tau_p));
      s.duration_ns = (m * tau_p + t_units) * c.tau_unit_ns;
      s.signed_flag = false;
      out.push_back(s);
      continue;
    }
    if (options.forward_search) {
      // scan for T > 0 with exp(G T) matching exp(G t) for the signed t
      const PulseSpec spec = stage_spec(s, c);
      const Mat4 G = spec.generator(gens);
      const Mat4 want = mat_exp(G * spec.tau);
      double best_T = -1.0, best_err = std::numeric_limits<double>::infinity();
      const double coarse = 1e-2;
      for (double T = coarse; T <= options.forward_search_horizon; T += coarse) {
        const double err = rms_distance(mat_exp(G * T), want);
        if (err < best_err) {
          best_err = err;
          best_T = T;
        }
      }
      for (int refine = 0; refine < 40; ++refine) {  // golden-free trisection
        const double lo = std::max(coarse / 2, best_T - coarse), hi = best_T + coarse;
        const double T1 = lo + (hi - lo) / 3.0, T2 = hi - (hi - lo) / 3.0;
        const double e1 = rms_distance(mat_exp(G * T1), want);
        const double e2 = rms_distance(mat_exp(G * T2), want);
        if (e1 < best_err) { best_err = e1; best_T = T1; }
        if (e2 < best_err) { best_err = e2; best_T = T2; }
      }
      if (best_err <= options.realizability_tol) {
        s.duration_ns = best_T * c.tau_unit_ns;
        s.signed_flag = false;
        out.push_back(s);
        continue;
      }
      if (!options.allow_signed)
        throw NumericError(
            "realizability_pass: no forward-time equivalent within the horizon "
            "(best rms " + std::to_string(best_err) + ")");
    }
    s.signed_flag = true;  // kept signed; physically this stage needs -K evolution
    out.push_back(s);
  }
  return out;
}

SimulationResult simulate(const PulseSchedule& schedule, const GeneratorSet& gens,
                          const std::optional<Vec4c>& psi0) {
  SimulationResult r;
  r.net = Mat4::Identity();
  Vec4c psi = psi0.value_or(Vec4c::Zero());
  if (psi0) r.de_trace.push_back(entanglement_degree(psi));
  for (const auto& s : schedule.stages) {
    const Mat4 U = s.unitary(gens);
    r.net = U * r.net;
    if (psi0) {
      psi = U * psi;
      r.de_trace.push_back(entanglement_degree(psi));
    }
  }
  return r;
}

PulseSchedule synthesize(const Mat4& target, const ControlBasis& basis,
                         const SynthOptions& options) {
  if (!is_unitary(target, 1e-9))
    throw ValidationError("synthesize: target is not unitary");
  const GeneratorSet& gens = basis.gens;
  const PhysicalConstants& c = gens.constants;

  // strip the global phase: project into SU(4) by det^(1/4)
  const Complex det = target.determinant();
  const Complex phase = std::pow(det, 0.25);
  const Mat4 su_target = target / phase;

  PulseSchedule sched;
  sched.target = su_target;
  sched.global_phase = phase;

  const Mat4 L = mat_log_unitary(su_target);
  if (L.cwiseAbs().maxCoeff() < 1e-13) {  // identity target: nothing to pulse
    sched.n = 1;
    sched.rms_error = rms_distance(Mat4::Identity(), su_target);
    return sched;
  }

  const Components comp = components_in_basis(L, basis);
  WeiNormanProblem problem(basis.algebra_elements(), comp.x);
  const WnResult wn = find_coordinates(problem, options.wn);

  // one cycle realizes exp(L/n) as the product e^{h1 H1} ... e^{h15 H15};
  // stages are listed in temporal order (first stage acts first), which is
  // the reverse of the matrix-product order
  std::vector<PulseStage> cycle;
  for (int j = 0; j < 15; ++j) {
    const auto stages = expand_recipe(wn.tau(j), basis.elements[j], c);
    cycle.insert(cycle.end(), stages.begin(), stages.end());
  }
  std::reverse(cycle.begin(), cycle.end());

  cycle = realizability_pass(cycle, gens, options);
  if (options.merge_stages) {
    std::vector<PulseStage> merged;
    for (const auto& s : cycle) {
      if (!merged.empty() && same_field(merged.back(), s) &&
          merged.back().signed_flag == s.signed_flag) {
        merged.back().duration_ns += s.duration_ns;
      } else {
        merged.push_back(s);
      }
    }
    cycle = std::move(merged);
  }
  sched.per_cycle_stages = static_cast<int>(cycle.size());

  sched.n = wn.n;
  sched.stages.reserve(cycle.size() * wn.n);
  for (int rep = 0; rep < wn.n; ++rep)
    sched.stages.insert(sched.stages.end(), cycle.begin(), cycle.end());

  for (const auto& s : sched.stages) {
    sched.total_time_ns += s.duration_ns;
    sched.gross_time_ns += std::abs(s.duration_ns);
    const double cap = c.B_unit_mT;
    if (std::abs(s.Bx_mT) > cap || std::abs(s.By_mT) > cap || std::abs(s.Bz_mT) > cap)
      sched.cap_violations.push_back("field beyond " + std::to_string(cap) + " mT");
  }

  const SimulationResult sim = simulate(sched, gens);
  sched.rms_error = rms_distance(sim.net, su_target);
  return sched;
}

void write_de_trace_csv(const std::vector<double>& trace, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw ValidationError("write_de_trace_csv: cannot open " + path);
  outf << "stage,De\n";
  outf.precision(17);
  for (size_t i = 0; i < trace.size(); ++i) outf << i << "," << trace[i] << "\n";
}

}  // namespace liesynth
