#ifndef LIESYNTH_WEI_NORMAN_HPP
#define LIESYNTH_WEI_NORMAN_HPP

#include <optional>
#include <string>
#include <vector>

#include "liesynth/lie_closure.hpp"

namespace liesynth {

/// Canonical-coordinate problem over a fixed ordered basis of the algebra:
/// find tau with exp(X) = prod_j exp(tau_j basis_j), X = sum_j x_j basis_j.
/// The adjoint matrices ad(basis_j) are precomputed in basis coordinates,
/// together with an eigendecomposition cache for fast exp(t ad_j).
class WeiNormanProblem {
 public:
  WeiNormanProblem(std::vector<AlgebraElement> basis, Eigen::VectorXd target_coords);

  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<AlgebraElement>& basis() const { return basis_; }
  const Eigen::VectorXd& target_coords() const { return target_coords_; }
  const Eigen::MatrixXd& adjoint_mat(int j) const { return adjoint_mats_[j]; }

  /// exp(t * ad(basis_j)) in basis coordinates; exact identity at t = 0.
  Eigen::MatrixXd exp_ad(int j, double t) const;

  /// Coordinates of a matrix over the basis (least squares; the residual of
  /// in-span matrices is at roundoff level).
  Eigen::VectorXd coords_of(const Mat4& m) const;

 private:
  std::vector<AlgebraElement> basis_;
  Eigen::VectorXd target_coords_;
  std::vector<Eigen::MatrixXd> adjoint_mats_;
  struct ExpCache {
    Eigen::MatrixXcd V;
    Eigen::MatrixXcd Winv;
    Eigen::VectorXcd lambda;
    bool usable;
  };
  std::vector<ExpCache> cache_;
  Eigen::MatrixXd stacked_;            // dim x 16
  Eigen::JacobiSVD<Eigen::MatrixXd> coords_solver_;
};

/// Builds the problem for a target matrix: coordinates are solved over the
/// basis and the residual must be at tolerance.
WeiNormanProblem make_problem(const std::vector<AlgebraElement>& basis, const Mat4& target,
                              double tol = 1e-9);

/// The Wei-Norman matrix: column j is column j of
/// exp(tau_1 ad_1) ... exp(tau_{j-1} ad_{j-1}); column 1 is e_1.
Eigen::MatrixXd wn_matrix(const WeiNormanProblem& problem, const Eigen::VectorXd& tau);

struct WnState {
  double t = 0.0;
  Eigen::VectorXd tau;
};

struct WnStepResult {
  WnState state;
  bool breakdown = false;   // singular M inside a substage
  double breakdown_time = 0.0;
};

/// One classical RK4 step of d tau / dt = M(tau)^-1 x.
WnStepResult wn_step(const WeiNormanProblem& problem, const WnState& state, double dt);

struct WeiNormanTrace {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> tau;
  std::vector<double> dets;
  std::optional<double> breakdown_time;
};

struct WnOptions {
  double dt = 1e-3;             // fixed grid step
  double det_threshold = 0.1;   // breakdown when det(M) drops below this
  bool record_trace = true;
};

struct WnResult {
  Eigen::VectorXd tau;  // coordinates at t = 1 of the final (rescaled) run
  int n = 1;            // split order: target = exp(X/n)^n
  WeiNormanTrace first_pass;       // trace of the n = 1 attempt
  WeiNormanTrace final_pass;       // trace of the successful run
};

/// Integrates the Wei-Norman equations over t in [0,1] on a fixed grid,
/// monitoring det(M). On breakdown at t*, restarts with x/n for
/// n = floor(1/t*) + 1 (one retry at n+1).
WnResult find_coordinates(const WeiNormanProblem& problem, const WnOptions& options = {});

/// CSV rows (t, det, tau_1..tau_N).
void write_trace_csv(const WeiNormanTrace& trace, const std::string& path);

}  // namespace liesynth

#endif
