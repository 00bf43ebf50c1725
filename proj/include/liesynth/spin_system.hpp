#ifndef LIESYNTH_SPIN_SYSTEM_HPP
#define LIESYNTH_SPIN_SYSTEM_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "liesynth/matrix_core.hpp"

namespace liesynth {

/// Gyromagnetic ratios, hyperfine coupling and the unit system of the
/// coupled nucleus-electron pair. gamma_e is kept in MHz/T so that all
/// frequency arithmetic happens in one unit.
struct PhysicalConstants {
  double gamma_n_MHz_per_T = 17.23;
  double gamma_e_MHz_per_T = 27970.0;
  double kappa_MHz = 58.765;
  double B_unit_mT = 10.0;
  double tau_unit_ns = 100.0;

  /// Dimensionless field scale: B_unit * (gamma_n + gamma_e) * tau_unit.
  double field_scale() const;
  /// Dimensionless coupling scale: kappa * tau_unit.
  double coupling_scale() const;
  /// Period of exp(coupling_scale * K * t) in time units: 4*pi / coupling_scale.
  double tau_period() const;

  void validate() const;  // kappa > 0, at least one gamma nonzero

  /// key=value file with keys gamma_n_MHz_per_T, gamma_e_MHz_per_T,
  /// kappa_MHz, B_unit_mT, tau_unit_ns ('#' comments allowed).
  static PhysicalConstants load(const std::string& path);
};

/// The directly available generators: X0, Y0, Z0, K of the quaternion block
/// and their unit-scaled versions XU = field_scale * X0 etc, KU = coupling_scale * K.
struct GeneratorSet {
  PhysicalConstants constants;
  Mat4 X0, Y0, Z0, K;
  Mat4 XU, YU, ZU, KU;
};

GeneratorSet make_generators(const PhysicalConstants& constants = {});

/// The fifteen named su(4) matrices, the X_KK/Y_KK/Z_KK alternates and the
/// degree-of-entanglement preserver span.
struct NamedBasis {
  Mat4 X, Y, Z, K;
  Mat4 KX, KY, KZ;
  Mat4 KXX, KYY, KZZ;
  Mat4 LX, LY, LZ;
  Mat4 KXY, KYZ, KZX;
  Mat4 XKK, YKK, ZKK;

  /// X..KZX with the L triple (unconditionally independent variant).
  std::vector<Mat4> l_variant() const;
  /// Same but with XKK, YKK, ZKK replacing the L triple.
  std::vector<Mat4> kk_variant() const;
};

NamedBasis make_named_basis(const PhysicalConstants& constants = {});

/// (Bx XU + By YU + Bz ZU + KU) * tau in unit scalings. Fields beyond one
/// unit (the hardware cap) raise ValidationError unless allow_over_cap.
Mat4 field_generator_matrix(const GeneratorSet& gens, double Bx, double By, double Bz,
                            double tau, bool allow_over_cap = false);

/// Degree of entanglement D_e = 2 |z1 z4 - z2 z3| of a normalized state.
double entanglement_degree(const Vec4c& psi);

struct PreserverResult {
  bool preserves;
  double phi0;
  double q_residual;     // ||H^T Q + Q H - i phi0 Q||
  double span_residual;  // distance of H from span of the d-basis
};

/// Tests H^T Q + Q H = i phi0 Q with Q = j x j, and cross-checks by
/// projecting H onto the explicit preserver span. Both must agree.
PreserverResult is_entanglement_preserver(const Mat4& H, double tol = 1e-10);

/// The seven-matrix spanning set of the preserver algebra.
std::vector<Mat4> preserver_span();

struct BracketReport {
  std::vector<std::pair<std::string, double>> rows;
  double max_residual;
};

/// Evaluates the 18 printed identities tying the named matrices to the
/// bracket relations (15 table entries plus the three X = X0 + kappa K forms).
BracketReport verify_bracket_table(const PhysicalConstants& constants = {});

struct TwoGeneratorIdentity {
  double printed_residual;  // residual of the identity exactly as printed
  double solved_residual;   // least-squares cross-check over the closure span
  double rhs_norm;          // norm of kappa (gn-ge)/(gn+ge) Z
};

/// The bracket identity that extracts Z from the X,Y generator pair.
TwoGeneratorIdentity two_generator_identity(const PhysicalConstants& constants = {});

/// The eight Gell-Mann-like combinations spanning the su(3) ideal at equal
/// gyromagnetic ratios. Throws ValidationError when gamma_n != gamma_e.
std::vector<Mat4> gell_mann_basis(const PhysicalConstants& constants);

/// Killing form Tr(ad(l_j) ad(l_k)) with ad taken inside the span of the
/// given basis.
Eigen::MatrixXd killing_form(const std::vector<Mat4>& basis);

/// Spectrum of K sorted by imaginary part: {-i/2 (x3), 3i/2}.
Vec4c k_spectrum();

}  // namespace liesynth

#endif
