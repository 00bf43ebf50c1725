#ifndef LIESYNTH_PULSE_SYNTH_HPP
#define LIESYNTH_PULSE_SYNTH_HPP

#include <optional>
#include <string>
#include <vector>

#include "liesynth/control_basis.hpp"
#include "liesynth/wei_norman.hpp"

namespace liesynth {

/// One physical stage: a rectangular magnetic pulse (field) or free coupling
/// evolution (idle). Durations are signed internally; the realizability pass
/// rewrites idle stages to non-negative durations exactly and flags field
/// stages it cannot rewrite.
struct PulseStage {
  enum class Kind { Field, Idle };
  double Bx_mT = 0.0, By_mT = 0.0, Bz_mT = 0.0;
  double duration_ns = 0.0;
  Kind kind = Kind::Idle;
  bool signed_flag = false;  // left with a negative duration by the pass

  Mat4 unitary(const GeneratorSet& gens) const;
};

struct PulseSchedule {
  std::vector<PulseStage> stages;  // temporal order: stages[0] acts first
  int n = 1;                       // split order; stages holds n concatenated cycles
  int per_cycle_stages = 0;
  Mat4 target = Mat4::Identity();
  Complex global_phase = 1.0;      // removed from the input target
  double rms_error = 0.0;
  double total_time_ns = 0.0;      // sum of signed durations
  double gross_time_ns = 0.0;      // sum of |durations|
  std::vector<std::string> cap_violations;
};

struct SynthOptions {
  WnOptions wn;
  bool merge_stages = true;        // merge adjacent stages with equal fields
  bool allow_signed = true;        // keep flagged signed field stages
  bool forward_search = false;     // opt-in search for exact forward inverses
  double forward_search_horizon = 64.0;  // units
  double realizability_tol = 1e-6;
};

/// Expands exp(h * element) into physical stages: the conjugator pulses,
/// the core pulse scaled by h, then the conjugators reversed and negated.
/// The product of the emitted stage unitaries equals exp(h * element.matrix)
/// exactly as a group identity.
std::vector<PulseStage> expand_recipe(double h, const ControlElement& element,
                                      const PhysicalConstants& constants);

/// Rewrites negative durations: idle stages become +(m tau_p - |t|) exactly;
/// field stages are searched for a forward-time equivalent when
/// forward_search is on, otherwise kept signed and flagged.
std::vector<PulseStage> realizability_pass(const std::vector<PulseStage>& stages,
                                           const GeneratorSet& gens,
                                           const SynthOptions& options = {});

struct SimulationResult {
  Mat4 net;                         // product of stage unitaries, first stage first
  std::vector<double> de_trace;     // D_e after each stage (index 0 = initial)
};

SimulationResult simulate(const PulseSchedule& schedule, const GeneratorSet& gens,
                          const std::optional<Vec4c>& psi0 = std::nullopt);

/// Full synthesis: log of the target, components over the control basis,
/// Wei-Norman coordinates with split order n, recipe expansion, realizability
/// pass, and a verification simulation.
PulseSchedule synthesize(const Mat4& target, const ControlBasis& basis,
                         const SynthOptions& options = {});

/// sqrt(tr(E^dag E) / 16) with E = A - B.
double rms_distance(const Mat4& A, const Mat4& B);

void write_de_trace_csv(const std::vector<double>& trace, const std::string& path);

}  // namespace liesynth

#endif
