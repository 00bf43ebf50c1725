#ifndef LIESYNTH_CONTROL_BASIS_HPP
#define LIESYNTH_CONTROL_BASIS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "liesynth/lie_closure.hpp"
#include "liesynth/spin_system.hpp"

namespace liesynth {

/// The 33 scalar constants parameterizing the realizable control family
/// H_1..H_15. Defaults are the published optimized values.
struct ControlParams {
  double b1 = 2.003, t1 = 0.151;
  double b2 = 1.5155, t2 = 0.176;
  double b3 = 1.958, t3 = 0.118;
  double t4 = 1.109;
  double b5 = 0.3015, t5 = 1.021;
  double b6 = 0.5195, t6 = 0.910;
  double t7 = 0.215;
  double b8 = 0.1925, t8 = 0.931;
  double b9 = 0.222, t9 = 0.926;
  double t10 = 0.2005;
  double b11 = -0.167, t11 = 0.9825;
  double b12 = 0.394, t12 = 0.9255;
  double b13 = 0.198, t13 = 1.017, c13 = 0.178, s13 = 0.9855;
  double b14 = 0.344, t14 = 1.000, c14 = 0.166, s14 = 0.9845;
  double b15 = 0.257, t15 = 0.900, c15 = 0.190, s15 = 1.377;

  /// Flat view in the canonical order (b1, t1, ..., c15, s15).
  std::array<double*, 33> flat();
  std::array<const double*, 33> flat() const;
  static const std::array<const char*, 33>& names();

  void validate() const;  // durations positive, values finite
};

/// One directly realizable pulse: exp((Bx XU + By YU + Bz ZU + KU) * tau).
struct PulseSpec {
  double Bx = 0.0, By = 0.0, Bz = 0.0;
  double tau = 0.0;

  bool is_idle() const { return Bx == 0.0 && By == 0.0 && Bz == 0.0; }
  Mat4 generator(const GeneratorSet& gens) const;  // per unit time
  Mat4 matrix(const GeneratorSet& gens) const;     // generator * tau
};

/// A control element with the pulse recipe that realizes it:
/// matrix = Ad(exp(conj_1)) ... Ad(exp(conj_m)) (core generator * core.tau).
struct ControlElement {
  Mat4 matrix;
  Vec16 coords;
  std::vector<PulseSpec> conjugators;
  PulseSpec core;  // core.tau is the unit-duration scale of the element
  std::string label;
};

struct ControlBasis {
  std::vector<ControlElement> elements;         // H_1..H_15
  Eigen::Matrix<double, 15, 16> stacked_coords;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double cond = 0.0;
  GeneratorSet gens;

  std::vector<AlgebraElement> algebra_elements() const;
};

struct DegenerateBasisError : NumericError {
  double sigma_min;
  explicit DegenerateBasisError(double smin)
      : NumericError("control basis is rank deficient (sigma_min = " +
                     std::to_string(smin) + ")"),
        sigma_min(smin) {}
};

/// Builds H_1..H_15 from the constants. H_11, H_12 conjugate by z-direction
/// pulses and H_15 by the (z, x) pair; the x/y/z pattern follows the
/// two-per-direction structure that makes the family a basis.
ControlBasis build_control_basis(const GeneratorSet& gens, const ControlParams& params,
                                 double rank_tol = 1e-9);

struct OptimizeOptions {
  int max_passes = 40;
  double initial_step = 0.05;
  double improve_tol = 1e-6;
  std::uint64_t seed = 0;
  int max_restarts = 32;  // random restarts hunting for a rank-15 seed
};

/// Coordinate-wise hill climbing on cond(build_control_basis(p)). The
/// objective is non-increasing across accepted steps and the result is
/// deterministic for a fixed seed and schedule.
ControlParams optimize_params(const GeneratorSet& gens, const ControlParams& initial,
                              const OptimizeOptions& options = {});

struct Components {
  Eigen::Matrix<double, 15, 1> x;
  double residual;
};

/// Least-squares components of X over the control basis.
Components components_in_basis(const Mat4& X, const ControlBasis& basis,
                               double tol = 1e-8);

}  // namespace liesynth

#endif
