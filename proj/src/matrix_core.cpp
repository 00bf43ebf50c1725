#include "liesynth/matrix_core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace liesynth {

bool is_skew_hermitian(const MatX& A, double tol) {
  return (A + A.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_traceless(const MatX& A, double tol) {
  return std::abs(A.trace()) <= tol;
}

bool is_unitary(const MatX& A, double tol) {
  if (A.rows() != A.cols()) return false;
  MatX r = A.adjoint() * A - MatX::Identity(A.rows(), A.cols());
  return r.cwiseAbs().maxCoeff() <= tol;
}

namespace {

// (13,13) Pade coefficients, Higham's ordering b[0..13].
constexpr double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

MatX pade13(const MatX& A) {
  const auto n = A.rows();
  const MatX I = MatX::Identity(n, n);
  const MatX A2 = A * A;
  const MatX A4 = A2 * A2;
  const MatX A6 = A4 * A2;
  const MatX U = A * (A6 * (kPade13[13] * A6 + kPade13[11] * A4 + kPade13[9] * A2) +
                      kPade13[7] * A6 + kPade13[5] * A4 + kPade13[3] * A2 + kPade13[1] * I);
  const MatX V = A6 * (kPade13[12] * A6 + kPade13[10] * A4 + kPade13[8] * A2) +
                 kPade13[6] * A6 + kPade13[4] * A4 + kPade13[2] * A2 + kPade13[0] * I;
  return (V - U).partialPivLu().solve(V + U);
}

}  // namespace

MatX mat_exp(const MatX& A) {
  if (A.rows() != A.cols())
    throw ValidationError("mat_exp: matrix must be square");
  if (!A.allFinite())
    throw NumericError("mat_exp: non-finite entries");
  const auto n = A.rows();
  if (n == 0) return A;
  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) return MatX::Identity(n, n);
  int squarings = 0;
  if (norm1 > kTheta13)
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  MatX E = pade13(A / std::pow(2.0, squarings));
  for (int s = 0; s < squarings; ++s) E = E * E;
  return E;
}

MatX ad(const MatX& X, const MatX& Y) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols() || X.rows() != X.cols())
    throw ValidationError("ad: dimension mismatch");
  return X * Y - Y * X;
}

MatX Ad(const MatX& g, const MatX& Y) {
  if (g.rows() != g.cols() || g.rows() != Y.rows() || Y.rows() != Y.cols())
    throw ValidationError("Ad: dimension mismatch");
  if (is_unitary(g, 1e-10)) return g * Y * g.adjoint();
  Eigen::PartialPivLU<MatX> lu(g);
  const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (pivot_min < 1e-13 * g.cwiseAbs().maxCoeff())
    throw NumericError("Ad: singular conjugator");
  const MatX ginv = lu.solve(MatX::Identity(g.rows(), g.cols()));
  return g * Y * ginv;
}

namespace {

// Eigendecomposition of a unitary through its commuting Hermitian parts:
// H = U + U^dag fixes the eigenspaces up to degeneracy in cos(theta),
// S = (U - U^dag)/i then splits by sin(theta). Returns unitary V.
MatX unitary_eigenvectors(const MatX& U) {
  const auto n = U.rows();
  const MatX H = U + U.adjoint();
  const MatX S = (U - U.adjoint()) / Complex(0, 1);
  Eigen::SelfAdjointEigenSolver<MatX> esH(H);
  MatX V = esH.eigenvectors();
  const Eigen::VectorXd evH = esH.eigenvalues();
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j < n && std::abs(evH(j) - evH(i)) < 1e-9 * (1.0 + std::abs(evH(i)))) ++j;
    if (j - i > 1) {
      MatX block = V.middleCols(i, j - i);
      MatX Ssub = block.adjoint() * S * block;
      Ssub = 0.5 * (Ssub + Ssub.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<MatX> esS(Ssub);
      V.middleCols(i, j - i) = block * esS.eigenvectors();
    }
    i = j;
  }
  return V;
}

}  // namespace

MatX mat_log_unitary(const MatX& U, double tol, LogInfo* info) {
  if (U.rows() != U.cols())
    throw ValidationError("mat_log_unitary: matrix must be square");
  if (!is_unitary(U, std::max(tol, 1e-9)))
    throw ValidationError("mat_log_unitary: input is not unitary to tolerance");
  const auto n = U.rows();

  MatX V = unitary_eigenvectors(U);
  Eigen::VectorXcd d = (V.adjoint() * U * V).diagonal();
  Eigen::VectorXd theta(n);
  bool warn = false;
  for (Eigen::Index a = 0; a < n; ++a) {
    theta(a) = std::atan2(d(a).imag(), d(a).real());
    if (std::abs(theta(a) - std::numbers::pi) < 1e-9) warn = true;  // -pi branch cut
  }

  int shifts = 0;
  const double phase_sum = theta.sum();
  const int m = static_cast<int>(std::lround(phase_sum / (2.0 * std::numbers::pi)));
  if (m != 0 && std::abs(U.determinant() - Complex(1, 0)) < 1e-6) {
    // Order columns by descending phase. Within a group of equal phases,
    // re-span the eigenspace from projections of the standard basis vectors
    // (largest projection first, ties by index) so the split below is
    // deterministic, then shift the trailing columns of the group.
    std::vector<int> order(n);
    for (int a = 0; a < static_cast<int>(n); ++a) order[a] = a;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return theta(a) > theta(b); });

    std::vector<std::vector<int>> groups;
    for (int a = 0; a < static_cast<int>(n);) {
      int b = a;
      while (b < static_cast<int>(n) &&
             std::abs(theta(order[b]) - theta(order[a])) < 1e-9)
        ++b;
      groups.emplace_back(order.begin() + a, order.begin() + b);
      a = b;
    }
    for (const auto& g : groups) {
      if (g.size() < 2) continue;
      MatX W(n, g.size());
      for (size_t c = 0; c < g.size(); ++c) W.col(c) = V.col(g[c]);
      const MatX P = W * W.adjoint();
      std::vector<std::pair<double, int>> seeds;
      for (int s = 0; s < static_cast<int>(n); ++s)
        seeds.emplace_back(-P.col(s).norm(), s);
      std::stable_sort(seeds.begin(), seeds.end());
      std::vector<Eigen::VectorXcd> span;
      for (const auto& [negnorm, s] : seeds) {
        (void)negnorm;
        Eigen::VectorXcd v = P.col(s);
        for (int pass = 0; pass < 2; ++pass)
          for (const auto& u : span) v -= (u.adjoint() * v)(0) * u;
        const double nv = v.norm();
        if (nv > 1e-8) span.push_back(v / nv);
        if (span.size() == g.size()) break;
      }
      for (size_t c = 0; c < g.size(); ++c) V.col(g[c]) = span[c];
    }

    int remaining = std::abs(m);
    const double delta = (m > 0) ? -2.0 * std::numbers::pi : 2.0 * std::numbers::pi;
    if (m > 0) {
      for (auto git = groups.begin(); git != groups.end() && remaining > 0; ++git)
        for (auto it = git->rbegin(); it != git->rend() && remaining > 0; ++it) {
          theta(*it) += delta;
          ++shifts;
          --remaining;
        }
    } else {
      for (auto git = groups.rbegin(); git != groups.rend() && remaining > 0; ++git)
        for (auto it = git->rbegin(); it != git->rend() && remaining > 0; ++it) {
          theta(*it) += delta;
          ++shifts;
          --remaining;
        }
    }
  }

  Eigen::VectorXcd itheta(n), phases(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    itheta(a) = Complex(0, theta(a));
    phases(a) = std::exp(Complex(0, theta(a)));
  }
  MatX L = V * itheta.asDiagonal() * V.adjoint();
  L = 0.5 * (L - L.adjoint()).eval();  // clean roundoff; exact skew-Hermitian
  if (info) {
    info->branch_warning = warn;
    info->shifts = shifts;
    info->residual = (U - V * phases.asDiagonal() * V.adjoint()).cwiseAbs().maxCoeff();
  }
  return L;
}

Mat4 kron2(const Mat2& A, const Mat2& B) {
  Mat4 C;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) C.block<2, 2>(2 * r, 2 * c) = A(r, c) * B;
  return C;
}

QuaternionBasis::QuaternionBasis() {
  const Complex I(0, 1);
  one << 1, 0, 0, 1;
  i << 0, I, I, 0;
  j << 0, -1, 1, 0;
  k << I, 0, 0, -I;
  const std::array<Mat2, 4> u = {one, i, j, k};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Mat4 T = kron2(u[a], u[b]);
      if ((a == 0) == (b == 0)) T *= I;  // keep every element skew-Hermitian
      tensor[4 * a + b] = T;
    }
}

const QuaternionBasis& QuaternionBasis::instance() {
  static const QuaternionBasis basis;
  return basis;
}

Vec16 vectorize(const Mat4& X) {
  const auto& B = QuaternionBasis::instance().tensor;
  Vec16 c;
  for (int idx = 0; idx < 16; ++idx)
    c(idx) = 0.25 * (B[idx].adjoint() * X).trace().real();
  return c;
}

VectorizeResult vectorize_with_residual(const Mat4& X) {
  VectorizeResult r;
  r.coords = vectorize(X);
  r.residual = (X - devectorize(r.coords)).norm();
  return r;
}

Mat4 devectorize(const Vec16& coords) {
  const auto& B = QuaternionBasis::instance().tensor;
  Mat4 X = Mat4::Zero();
  for (int idx = 0; idx < 16; ++idx) X += coords(idx) * B[idx];
  return X;
}

std::vector<int> independent_subset(const std::vector<Vec16>& vectors, double tol) {
  std::vector<int> keep;
  if (vectors.empty()) return keep;
  double max_norm = 0.0;
  for (const auto& v : vectors) max_norm = std::max(max_norm, v.norm());
  if (max_norm == 0.0) return keep;

  std::vector<Vec16> ortho;
  for (int idx = 0; idx < static_cast<int>(vectors.size()); ++idx) {
    Vec16 r = vectors[idx];
    for (int pass = 0; pass < 2; ++pass)  // re-orthogonalize for stability
      for (const auto& q : ortho) r -= q.dot(r) * q;
    const double res = r.norm();
    if (res > tol * max_norm) {
      ortho.push_back(r / res);
      keep.push_back(idx);
    }
  }
  return keep;
}

double gram_determinant_16(const std::vector<Mat4>& fifteen) {
  if (fifteen.size() != 15)
    throw ValidationError("gram_determinant_16: expected exactly 15 matrices");
  Eigen::Matrix<double, 16, 16> rows;
  for (int r = 0; r < 15; ++r) rows.row(r) = vectorize(fifteen[r]).transpose();
  rows.row(15) = vectorize(Complex(0, 1) * Mat4::Identity()).transpose();
  return rows.determinant();
}

SingularSummary condition_number(const std::vector<Vec16>& vectors) {
  if (vectors.empty()) throw ValidationError("condition_number: empty input");
  Eigen::MatrixXd stack(vectors.size(), 16);
  for (int r = 0; r < static_cast<int>(vectors.size()); ++r)
    stack.row(r) = vectors[r].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack);
  const auto& sv = svd.singularValues();
  SingularSummary s;
  s.sigma_max = sv(0);
  s.sigma_min = sv(sv.size() - 1);
  s.cond = (s.sigma_min > 0.0) ? s.sigma_max / s.sigma_min
                               : std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace liesynth
