#include "liesynth/spin_system.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace liesynth {

double PhysicalConstants::field_scale() const {
  // mT * MHz/T * ns: 1e-3 T * 1e6 1/s/T * 1e-9 s = 1e-6
  return B_unit_mT * (gamma_n_MHz_per_T + gamma_e_MHz_per_T) * tau_unit_ns * 1e-6;
}

double PhysicalConstants::coupling_scale() const {
  return kappa_MHz * tau_unit_ns * 1e-3;
}

double PhysicalConstants::tau_period() const {
  return 4.0 * std::numbers::pi / coupling_scale();
}

void PhysicalConstants::validate() const {
  if (!(kappa_MHz > 0.0))
    throw ValidationError("constants: kappa must be positive");
  if (gamma_n_MHz_per_T == 0.0 && gamma_e_MHz_per_T == 0.0)
    throw ValidationError("constants: at least one gyromagnetic ratio must be nonzero");
  if (!(B_unit_mT > 0.0) || !(tau_unit_ns > 0.0))
    throw ValidationError("constants: unit scalings must be positive");
}

PhysicalConstants PhysicalConstants::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("constants: cannot open " + path);
  PhysicalConstants c;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    double value = 0.0;
    std::istringstream vs(line.substr(eq + 1));
    if (!(vs >> value)) throw ValidationError("constants: bad value for " + key);
    if (key == "gamma_n_MHz_per_T") c.gamma_n_MHz_per_T = value;
    else if (key == "gamma_e_MHz_per_T") c.gamma_e_MHz_per_T = value;
    else if (key == "kappa_MHz") c.kappa_MHz = value;
    else if (key == "B_unit_mT") c.B_unit_mT = value;
    else if (key == "tau_unit_ns") c.tau_unit_ns = value;
    else throw ValidationError("constants: unknown key " + key);
  }
  c.validate();
  return c;
}

GeneratorSet make_generators(const PhysicalConstants& constants) {
  constants.validate();
  const auto& q = QuaternionBasis::instance();
  const double gn = constants.gamma_n_MHz_per_T;
  const double ge = constants.gamma_e_MHz_per_T;
  const double gs = gn + ge;
  GeneratorSet g;
  g.constants = constants;
  g.X0 = (-gn * kron2(q.i, q.one) + ge * kron2(q.one, q.i)) / gs;
  g.Y0 = (gn * kron2(q.j, q.one) - ge * kron2(q.one, q.j)) / gs;
  g.Z0 = (-gn * kron2(q.k, q.one) + ge * kron2(q.one, q.k)) / gs;
  g.K = Complex(0, 0.5) * (kron2(q.i, q.i) + kron2(q.j, q.j) + kron2(q.k, q.k));
  g.XU = constants.field_scale() * g.X0;
  g.YU = constants.field_scale() * g.Y0;
  g.ZU = constants.field_scale() * g.Z0;
  g.KU = constants.coupling_scale() * g.K;
  return g;
}

NamedBasis make_named_basis(const PhysicalConstants& constants) {
  const auto& q = QuaternionBasis::instance();
  const GeneratorSet g = make_generators(constants);
  const double gn = constants.gamma_n_MHz_per_T;
  const double ge = constants.gamma_e_MHz_per_T;
  const double gs = gn + ge;
  const double kap = constants.kappa_MHz;
  const Complex I(0, 1);

  NamedBasis b;
  b.K = g.K;
  b.X = g.X0 + kap * g.K;
  b.Y = g.Y0 + kap * g.K;
  b.Z = g.Z0 + kap * g.K;
  b.KX = 0.5 * I * (-kron2(q.j, q.k) + kron2(q.k, q.j));
  b.KY = 0.5 * I * (kron2(q.k, q.i) - kron2(q.i, q.k));
  b.KZ = 0.5 * I * (-kron2(q.i, q.j) + kron2(q.j, q.i));
  b.KXX = -0.5 * I * (kron2(q.j, q.j) + kron2(q.k, q.k));
  b.KYY = -0.5 * I * (kron2(q.i, q.i) + kron2(q.k, q.k));
  b.KZZ = -0.5 * I * (kron2(q.i, q.i) + kron2(q.j, q.j));
  b.LX = -0.25 * (kron2(q.i, q.one) + kron2(q.one, q.i));
  b.LY = 0.25 * (kron2(q.j, q.one) + kron2(q.one, q.j));
  b.LZ = -0.25 * (kron2(q.k, q.one) + kron2(q.one, q.k));
  b.KXY = -0.5 * I / gs * (gn * kron2(q.i, q.j) + ge * kron2(q.j, q.i)) -
          0.5 * kap * (kron2(q.i, q.one) - kron2(q.one, q.i));
  b.KYZ = -0.5 * I / gs * (gn * kron2(q.j, q.k) + ge * kron2(q.k, q.j)) -
          0.5 * kap * (-kron2(q.j, q.one) + kron2(q.one, q.j));
  b.KZX = 0.5 * I / gs * (gn * kron2(q.k, q.i) + ge * kron2(q.i, q.k)) -
          0.5 * kap * (kron2(q.k, q.one) - kron2(q.one, q.k));
  b.XKK = 0.5 * (kron2(q.i, q.one) - kron2(q.one, q.i));
  b.YKK = 0.5 * (-kron2(q.j, q.one) + kron2(q.one, q.j));
  b.ZKK = 0.5 * (kron2(q.k, q.one) - kron2(q.one, q.k));
  return b;
}

std::vector<Mat4> NamedBasis::l_variant() const {
  return {X, Y, Z, KX, KY, KZ, KXX, KYY, KZZ, LX, LY, LZ, KXY, KYZ, KZX};
}

std::vector<Mat4> NamedBasis::kk_variant() const {
  return {X, Y, Z, KX, KY, KZ, KXX, KYY, KZZ, XKK, YKK, ZKK, KXY, KYZ, KZX};
}

Mat4 field_generator_matrix(const GeneratorSet& gens, double Bx, double By, double Bz,
                            double tau, bool allow_over_cap) {
  if (tau < 0.0) throw ValidationError("field_generator: negative duration");
  const double cap = 1.0;  // one unit = B_unit_mT
  if (!allow_over_cap &&
      (std::abs(Bx) > cap || std::abs(By) > cap || std::abs(Bz) > cap))
    throw ValidationError("field_generator: field exceeds the hardware cap");
  return (Bx * gens.XU + By * gens.YU + Bz * gens.ZU + gens.KU) * tau;
}

double entanglement_degree(const Vec4c& psi) {
  return 2.0 * std::abs(psi(0) * psi(3) - psi(1) * psi(2));
}

std::vector<Mat4> preserver_span() {
  const auto& q = QuaternionBasis::instance();
  const Complex I(0, 1);
  return {I * Mat4::Identity(),
          kron2(q.i, q.one), kron2(q.j, q.one), kron2(q.k, q.one),
          kron2(q.one, q.i), kron2(q.one, q.j), kron2(q.one, q.k)};
}

PreserverResult is_entanglement_preserver(const Mat4& H, double tol) {
  const auto& q = QuaternionBasis::instance();
  const Mat4 Q = kron2(q.j, q.j);
  const Mat4 R = H.transpose() * Q + Q * H;
  // fit the real scalar phi0 in R = i phi0 Q
  const Complex num = (Q.adjoint() * R).trace();
  const double qq = (Q.adjoint() * Q).trace().real();
  const double phi0 = (num / Complex(0, 1)).real() / qq;
  PreserverResult out;
  out.phi0 = phi0;
  out.q_residual = (R - Complex(0, phi0) * Q).cwiseAbs().maxCoeff();

  // cross-check: distance from the explicit span
  Vec16 v = vectorize(H);
  std::vector<Vec16> basis;
  for (const auto& m : preserver_span()) basis.push_back(vectorize(m));
  // Gram-Schmidt the 7 basis vectors (they are orthogonal already, but stay general)
  std::vector<Vec16> ortho;
  for (auto b : basis) {
    for (const auto& u : ortho) b -= u.dot(b) * u;
    ortho.push_back(b / b.norm());
  }
  Vec16 r = v;
  for (const auto& u : ortho) r -= u.dot(r) * u;
  out.span_residual = 2.0 * r.norm();  // coords norm -> Frobenius (basis norm 2)

  const double scale = std::max(1.0, H.norm());
  out.preserves = out.q_residual <= tol * scale && out.span_residual <= tol * scale;
  return out;
}

BracketReport verify_bracket_table(const PhysicalConstants& constants) {
  const NamedBasis b = make_named_basis(constants);
  const GeneratorSet g = make_generators(constants);
  const double kap = constants.kappa_MHz;
  auto half = [](const Mat4& A, const Mat4& B) -> Mat4 { return 0.5 * (A * B - B * A); };
  auto resid = [](const Mat4& A, const Mat4& B) {
    return (A - B).cwiseAbs().maxCoeff();
  };

  BracketReport rep;
  auto row = [&](const std::string& name, double r) { rep.rows.emplace_back(name, r); };
  row("X = X0 + kappa K", resid(b.X, g.X0 + kap * g.K));
  row("Y = Y0 + kappa K", resid(b.Y, g.Y0 + kap * g.K));
  row("Z = Z0 + kappa K", resid(b.Z, g.Z0 + kap * g.K));
  row("KX = 1/2 [K, X]", resid(b.KX, half(b.K, b.X)));
  row("XKK = 1/2 [K, KX]", resid(b.XKK, half(b.K, b.KX)));
  row("KXX = 1/2 [KX, X] + kappa XKK", resid(b.KXX, half(b.KX, b.X) + kap * b.XKK));
  row("KY = 1/2 [K, Y]", resid(b.KY, half(b.K, b.Y)));
  row("YKK = 1/2 [K, KY]", resid(b.YKK, half(b.K, b.KY)));
  row("KYY = 1/2 [KY, Y] + kappa YKK", resid(b.KYY, half(b.KY, b.Y) + kap * b.YKK));
  row("KZ = 1/2 [K, Z]", resid(b.KZ, half(b.K, b.Z)));
  row("ZKK = 1/2 [K, KZ]", resid(b.ZKK, half(b.K, b.KZ)));
  row("KZZ = 1/2 [KZ, Z] + kappa ZKK", resid(b.KZZ, half(b.KZ, b.Z) + kap * b.ZKK));
  row("KXY = 1/2 [KX, Y]", resid(b.KXY, half(b.KX, b.Y)));
  row("KYZ = 1/2 [KY, Z]", resid(b.KYZ, half(b.KY, b.Z)));
  row("KZX = 1/2 [KZ, X]", resid(b.KZX, half(b.KZ, b.X)));
  row("LZ = 1/2 [KX, KY]", resid(b.LZ, half(b.KX, b.KY)));
  row("LX = 1/2 [KY, KZ]", resid(b.LX, half(b.KY, b.KZ)));
  row("LY = 1/2 [KZ, KX]", resid(b.LY, half(b.KZ, b.KX)));

  rep.max_residual = 0.0;
  for (const auto& [name, r] : rep.rows) rep.max_residual = std::max(rep.max_residual, r);
  return rep;
}

TwoGeneratorIdentity two_generator_identity(const PhysicalConstants& constants) {
  const double gn = constants.gamma_n_MHz_per_T;
  const double ge = constants.gamma_e_MHz_per_T;
  const double kap = constants.kappa_MHz;
  const double gs = gn + ge;
  const NamedBasis b = make_named_basis(constants);
  auto br = [](const Mat4& A, const Mat4& B) -> Mat4 { return A * B - B * A; };

  const Mat4 lhs = br(b.KXY, b.X) +
                   kap * std::pow((gn - ge) / gs, 2) * br(b.KX, b.KY) +
                   kap * kap * (gn - ge) / gs * b.K +
                   2.0 * kap * kap * b.KX +
                   2.0 * ge * gn / (gs * gs) * b.KY;
  const Mat4 rhs = kap * (gn - ge) / gs * b.Z;

  TwoGeneratorIdentity out;
  out.printed_residual = vectorize(lhs - rhs).norm() * 2.0;  // Frobenius
  out.rhs_norm = rhs.norm();

  // cross-check: expand [KXY, X] over the closure span by least squares
  const std::vector<Mat4> span = {br(b.KX, b.KY), b.K, b.KX, b.KY, b.Z,
                                  b.X, b.Y, b.KZ, b.KXX, b.KYY, b.KZZ,
                                  b.XKK, b.YKK, b.ZKK, b.LX, b.LY, b.LZ};
  Eigen::MatrixXd A(16, span.size());
  for (int c = 0; c < static_cast<int>(span.size()); ++c)
    A.col(c) = vectorize(span[c]);
  const Vec16 target = -vectorize(br(b.KXY, b.X));
  Eigen::VectorXd coef = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(target);
  out.solved_residual = (A * coef - target).norm() * 2.0;
  return out;
}

std::vector<Mat4> gell_mann_basis(const PhysicalConstants& constants) {
  if (constants.gamma_n_MHz_per_T != constants.gamma_e_MHz_per_T ||
      constants.gamma_n_MHz_per_T == 0.0)
    throw ValidationError("gell_mann_basis: requires gamma_n == gamma_e != 0");
  const NamedBasis b = make_named_basis(constants);
  const double kap = constants.kappa_MHz;
  const double s2 = std::sqrt(2.0);
  std::vector<Mat4> lam(8);
  lam[0] = b.KXX - b.KYY;
  lam[1] = 2.0 * (b.KXY - kap * b.X + kap * kap * b.K);
  lam[2] = 2.0 * b.LZ;
  lam[3] = (b.X - kap * b.K + b.KY) / s2;
  lam[4] = (b.Y - kap * b.K - b.KX) / s2;
  lam[5] = (b.X - kap * b.K - b.KY) / s2;
  lam[6] = -(b.Y - kap * b.K + b.KX) / s2;
  lam[7] = (b.KXX + b.KYY) / std::sqrt(3.0);
  return lam;
}

Eigen::MatrixXd killing_form(const std::vector<Mat4>& basis) {
  const int n = static_cast<int>(basis.size());
  Eigen::MatrixXd stack(n, 16);
  for (int r = 0; r < n; ++r) stack.row(r) = vectorize(basis[r]).transpose();
  const auto solver = stack.transpose().bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV);

  // ad matrices in the coordinates of the given span
  std::vector<Eigen::MatrixXd> admats(n, Eigen::MatrixXd(n, n));
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      const Mat4 br = basis[a] * basis[c] - basis[c] * basis[a];
      const Eigen::VectorXd coords = solver.solve(vectorize(br));
      if ((stack.transpose() * coords - vectorize(br)).norm() > 1e-8 * (1.0 + br.norm()))
        throw NumericError("killing_form: span is not closed under the bracket");
      admats[a].col(c) = coords;
    }

  Eigen::MatrixXd Kf(n, n);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) Kf(a, c) = (admats[a] * admats[c]).trace();
  return Kf;
}

Vec4c k_spectrum() {
  const GeneratorSet g = make_generators(PhysicalConstants{});
  Eigen::ComplexEigenSolver<Mat4> es(g.K);
  Vec4c ev = es.eigenvalues();
  std::array<int, 4> idx = {0, 1, 2, 3};
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return ev(a).imag() < ev(b).imag(); });
  Vec4c out;
  for (int a = 0; a < 4; ++a) out(a) = ev(idx[a]);
  return out;
}

}  // namespace liesynth
