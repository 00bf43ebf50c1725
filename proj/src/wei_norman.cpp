#include "liesynth/wei_norman.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>

namespace liesynth {

WeiNormanProblem::WeiNormanProblem(std::vector<AlgebraElement> basis,
                                   Eigen::VectorXd target_coords)
    : basis_(std::move(basis)), target_coords_(std::move(target_coords)) {
  const int n = dim();
  if (n == 0) throw ValidationError("WeiNormanProblem: empty basis");
  if (target_coords_.size() != n)
    throw ValidationError("WeiNormanProblem: coordinate size mismatch");
  if (!target_coords_.allFinite())
    throw NumericError("WeiNormanProblem: non-finite target coordinates");

  stacked_.resize(n, 16);
  for (int r = 0; r < n; ++r) stacked_.row(r) = basis_[r].coords.transpose();
  coords_solver_.compute(stacked_.transpose(),
                         Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (coords_solver_.rank() < n)
    throw ValidationError("WeiNormanProblem: basis is rank deficient");

  adjoint_mats_.resize(n);
  for (int j = 0; j < n; ++j) {
    adjoint_mats_[j].resize(n, n);
    for (int m = 0; m < n; ++m) {
      const Mat4 br = basis_[j].matrix * basis_[m].matrix - basis_[m].matrix * basis_[j].matrix;
      const Eigen::VectorXd c = coords_solver_.solve(vectorize(br));
      if ((stacked_.transpose() * c - vectorize(br)).norm() > 1e-8 * (1.0 + br.norm()))
        throw NumericError("WeiNormanProblem: basis span is not bracket-closed");
      adjoint_mats_[j].col(m) = c;
    }
  }

  // eigendecomposition cache for exp(t ad_j); falls back to Pade if the
  // eigenbasis reconstruction is poor
  cache_.resize(n);
  for (int j = 0; j < n; ++j) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(adjoint_mats_[j]);
    cache_[j].V = es.eigenvectors();
    cache_[j].lambda = es.eigenvalues();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(cache_[j].V);
    cache_[j].Winv = lu.solve(Eigen::MatrixXcd::Identity(n, n));
    const Eigen::MatrixXcd recon =
        cache_[j].V * cache_[j].lambda.asDiagonal() * cache_[j].Winv;
    const double err = (recon.real() - adjoint_mats_[j]).cwiseAbs().maxCoeff();
    cache_[j].usable = err < 1e-10 * (1.0 + adjoint_mats_[j].cwiseAbs().maxCoeff());
  }
}

Eigen::MatrixXd WeiNormanProblem::exp_ad(int j, double t) const {
  const int n = dim();
  if (t == 0.0) return Eigen::MatrixXd::Identity(n, n);
  const auto& c = cache_[j];
  if (!c.usable) return mat_exp(Complex(t, 0) * adjoint_mats_[j].cast<Complex>()).real();
  Eigen::VectorXcd ph(n);
  for (int a = 0; a < n; ++a) ph(a) = std::exp(t * c.lambda(a));
  return (c.V * ph.asDiagonal() * c.Winv).real();
}

Eigen::VectorXd WeiNormanProblem::coords_of(const Mat4& m) const {
  return coords_solver_.solve(vectorize(m));
}

WeiNormanProblem make_problem(const std::vector<AlgebraElement>& basis, const Mat4& target,
                              double tol) {
  Eigen::MatrixXd stacked(static_cast<int>(basis.size()), 16);
  for (int r = 0; r < static_cast<int>(basis.size()); ++r)
    stacked.row(r) = basis[r].coords.transpose();
  const Vec16 w = vectorize(target);
  Eigen::VectorXd x = stacked.transpose()
                          .bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                          .solve(w);
  const double resid = (stacked.transpose() * x - w).norm();
  if (resid > tol * std::max(1.0, w.norm()))
    throw ValidationError("make_problem: target is not in the basis span");
  return WeiNormanProblem(basis, x);
}

Eigen::MatrixXd wn_matrix(const WeiNormanProblem& problem, const Eigen::VectorXd& tau) {
  const int n = problem.dim();
  if (!tau.allFinite()) throw NumericError("wn_matrix: non-finite coordinates");
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  bool accumulated = false;
  for (int j = 1; j < n; ++j) {
    const double tj = tau(j - 1);
    if (tj != 0.0) {
      if (!accumulated) {
        P = problem.exp_ad(j - 1, tj);
        accumulated = true;
      } else {
        P = P * problem.exp_ad(j - 1, tj);
      }
    }
    if (accumulated) M.col(j) = P.col(j);
  }
  return M;
}

namespace {

struct RhsResult {
  Eigen::VectorXd f;
  bool singular = false;
};

RhsResult wn_rhs(const WeiNormanProblem& problem, const Eigen::VectorXd& tau,
                 const Eigen::VectorXd& x) {
  RhsResult r;
  const Eigen::MatrixXd M = wn_matrix(problem, tau);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (pivot_min < 1e-13) {
    r.singular = true;
    r.f = Eigen::VectorXd::Zero(problem.dim());
    return r;
  }
  r.f = lu.solve(x);
  return r;
}

WnStepResult step_with(const WeiNormanProblem& problem, const WnState& state, double dt,
                       const Eigen::VectorXd& x) {
  WnStepResult out;
  const Eigen::VectorXd& tau = state.tau;
  const auto k1 = wn_rhs(problem, tau, x);
  const auto k2 = k1.singular ? k1 : wn_rhs(problem, tau + 0.5 * dt * k1.f, x);
  const auto k3 = k2.singular ? k2 : wn_rhs(problem, tau + 0.5 * dt * k2.f, x);
  const auto k4 = k3.singular ? k3 : wn_rhs(problem, tau + dt * k3.f, x);
  if (k1.singular || k2.singular || k3.singular || k4.singular) {
    out.breakdown = true;
    out.breakdown_time = state.t;
    out.state = state;
    return out;
  }
  out.state.t = state.t + dt;
  out.state.tau = tau + (dt / 6.0) * (k1.f + 2.0 * k2.f + 2.0 * k3.f + k4.f);
  return out;
}

struct PassResult {
  Eigen::VectorXd tau;
  bool broke = false;
  double t_star = 0.0;
  WeiNormanTrace trace;
};

PassResult run_pass(const WeiNormanProblem& problem, const Eigen::VectorXd& x,
                    const WnOptions& opt) {
  PassResult out;
  const int nsteps = static_cast<int>(std::llround(1.0 / opt.dt));
  WnState state;
  state.t = 0.0;
  state.tau = Eigen::VectorXd::Zero(problem.dim());
  if (opt.record_trace) {
    out.trace.times.push_back(0.0);
    out.trace.tau.push_back(state.tau);
    out.trace.dets.push_back(1.0);  // M(0) is exactly the identity
  }
  for (int k = 0; k < nsteps; ++k) {
    const WnStepResult step = step_with(problem, state, opt.dt, x);
    if (step.breakdown) {
      out.broke = true;
      out.t_star = std::max(step.breakdown_time, opt.dt);
      out.trace.breakdown_time = out.t_star;
      out.tau = state.tau;
      return out;
    }
    state = step.state;
    const double det = wn_matrix(problem, state.tau).partialPivLu().determinant();
    if (opt.record_trace) {
      out.trace.times.push_back(state.t);
      out.trace.tau.push_back(state.tau);
      out.trace.dets.push_back(det);
    }
    if (det < opt.det_threshold) {
      out.broke = true;
      out.t_star = state.t;
      out.trace.breakdown_time = state.t;
      out.tau = state.tau;
      return out;
    }
  }
  out.tau = state.tau;
  return out;
}

}  // namespace

WnStepResult wn_step(const WeiNormanProblem& problem, const WnState& state, double dt) {
  return step_with(problem, state, dt, problem.target_coords());
}

WnResult find_coordinates(const WeiNormanProblem& problem, const WnOptions& options) {
  if (!(options.dt > 0.0 && options.dt <= 0.01))
    throw ValidationError("find_coordinates: dt must be in (0, 0.01]");
  if (!(options.det_threshold > 0.0 && options.det_threshold < 1.0))
    throw ValidationError("find_coordinates: det threshold must be in (0, 1)");

  WnResult out;
  const Eigen::VectorXd& x = problem.target_coords();
  PassResult first = run_pass(problem, x, options);
  out.first_pass = std::move(first.trace);
  if (!first.broke) {
    out.tau = first.tau;
    out.n = 1;
    out.final_pass = out.first_pass;
    return out;
  }

  int n = static_cast<int>(std::floor(1.0 / first.t_star)) + 1;
  PassResult second = run_pass(problem, x / n, options);
  if (second.broke) {
    ++n;  // one retry at n + 1
    second = run_pass(problem, x / n, options);
    if (second.broke)
      throw NumericError(
          "find_coordinates: breakdown persists after rescaling to n = " +
          std::to_string(n) + " (t* = " + std::to_string(second.t_star) + ")");
  }
  out.tau = second.tau;
  out.n = n;
  out.final_pass = std::move(second.trace);
  return out;
}

void write_trace_csv(const WeiNormanTrace& trace, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw ValidationError("write_trace_csv: cannot open " + path);
  const int n = trace.tau.empty() ? 0 : static_cast<int>(trace.tau.front().size());
  outf << "t,det";
  for (int j = 1; j <= n; ++j) outf << ",tau" << j;
  outf << "\n";
  outf.precision(17);
  for (size_t r = 0; r < trace.times.size(); ++r) {
    outf << trace.times[r] << "," << trace.dets[r];
    for (int j = 0; j < n; ++j) outf << "," << trace.tau[r](j);
    outf << "\n";
  }
}

}  // namespace liesynth
