#ifndef LIESYNTH_MATRIX_CORE_HPP
#define LIESYNTH_MATRIX_CORE_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace liesynth {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using MatX = Eigen::MatrixXcd;
using Vec4c = Eigen::Vector4cd;
using Vec16 = Eigen::Matrix<double, 16, 1>;

/// Thrown on malformed inputs (dimensions, non-unitary targets, bad files).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a numerical procedure cannot meet its contract.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_skew_hermitian(const MatX& A, double tol = 1e-12);
bool is_traceless(const MatX& A, double tol = 1e-12);
bool is_unitary(const MatX& A, double tol = 1e-12);

/// Matrix exponential by scaling-and-squaring with a fixed (13,13) Pade core.
/// Squaring count is taken from the 1-norm, so the result is deterministic.
MatX mat_exp(const MatX& A);

struct LogInfo {
  bool branch_warning = false;  // an eigenphase sat on the -pi branch cut
  int shifts = 0;               // number of 2*pi phase shifts applied
  double residual = 0.0;        // ||U - V D V^dag|| of the eigendecomposition
};

/// Skew-Hermitian logarithm of a unitary. Eigenphases are taken in (-pi, pi];
/// for det-1 inputs the phases are shifted by multiples of 2*pi (largest phase
/// first) so that the result is traceless. Within a degenerate eigenvalue the
/// eigenspace is re-spanned deterministically by projecting the standard basis
/// vectors, so repeated runs and pi-branch splits are reproducible.
MatX mat_log_unitary(const MatX& U, double tol = 1e-9, LogInfo* info = nullptr);

/// Commutator ad(X)Y = XY - YX.
MatX ad(const MatX& X, const MatX& Y);

/// Conjugation Ad(g)Y = g Y g^-1; uses g^dag when g is unitary.
MatX Ad(const MatX& g, const MatX& Y);

/// Kronecker product of two 2x2 blocks (first factor indexes the coarse grid).
Mat4 kron2(const Mat2& A, const Mat2& B);

/// The quaternion units 1, i, j, k as 2x2 matrices and the 16-element
/// skew-Hermitian tensor basis built from them: i*(1 x 1) at index 0,
/// 1 x u_k and u_j x 1 on the first row/column, i*(u_j x u_k) elsewhere.
/// All 16 are mutually orthogonal under <A,B> = Re tr(A^dag B) with norm^2 4.
struct QuaternionBasis {
  Mat2 one, i, j, k;
  std::array<Mat4, 16> tensor;  // index 4*j + k

  static const QuaternionBasis& instance();

 private:
  QuaternionBasis();
};

/// Coordinates of X over the tensor basis: coords[4j+k] = <B_jk, X> / 4.
/// Exact for skew-Hermitian X; otherwise this is the orthogonal projection.
Vec16 vectorize(const Mat4& X);

struct VectorizeResult {
  Vec16 coords;
  double residual;  // ||X - devectorize(coords)||_F
};
VectorizeResult vectorize_with_residual(const Mat4& X);

Mat4 devectorize(const Vec16& coords);

/// Indices of a maximal linearly independent subset, chosen greedily in input
/// order. A vector is dependent when its residual after projection onto the
/// span of the accepted set is below tol times the largest input norm.
std::vector<int> independent_subset(const std::vector<Vec16>& vectors, double tol = 1e-9);

/// Determinant of the 16x16 array formed by the row vectorizations of the
/// given fifteen matrices with vectorize(i*1x1) appended as the last row.
double gram_determinant_16(const std::vector<Mat4>& fifteen);

struct SingularSummary {
  double sigma_max;
  double sigma_min;
  double cond;  // +inf when sigma_min == 0
};

/// Extreme singular values of the stacked row matrix.
SingularSummary condition_number(const std::vector<Vec16>& vectors);

}  // namespace liesynth

#endif
