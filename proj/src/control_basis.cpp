#include "liesynth/control_basis.hpp"

#include <cmath>
#include <random>

namespace liesynth {

std::array<double*, 33> ControlParams::flat() {
  return {&b1, &t1, &b2, &t2, &b3, &t3, &t4, &b5, &t5, &b6, &t6, &t7,
          &b8, &t8, &b9, &t9, &t10, &b11, &t11, &b12, &t12,
          &b13, &t13, &c13, &s13, &b14, &t14, &c14, &s14, &b15, &t15, &c15, &s15};
}

std::array<const double*, 33> ControlParams::flat() const {
  auto mut = const_cast<ControlParams*>(this)->flat();
  std::array<const double*, 33> out;
  for (size_t i = 0; i < out.size(); ++i) out[i] = mut[i];
  return out;
}

const std::array<const char*, 33>& ControlParams::names() {
  static const std::array<const char*, 33> n = {
      "b1", "t1", "b2", "t2", "b3", "t3", "t4", "b5", "t5", "b6", "t6", "t7",
      "b8", "t8", "b9", "t9", "t10", "b11", "t11", "b12", "t12",
      "b13", "t13", "c13", "s13", "b14", "t14", "c14", "s14", "b15", "t15", "c15", "s15"};
  return n;
}

void ControlParams::validate() const {
  for (const double* p : flat())
    if (!std::isfinite(*p)) throw ValidationError("params: non-finite constant");
  for (const char* key : {"t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t9",
                          "t10", "t11", "t12", "t13", "s13", "t14", "s14", "t15", "s15"}) {
    const auto& nm = names();
    for (size_t i = 0; i < nm.size(); ++i)
      if (std::string(nm[i]) == key && *flat()[i] <= 0.0)
        throw ValidationError(std::string("params: duration ") + key + " must be positive");
  }
}

Mat4 PulseSpec::generator(const GeneratorSet& gens) const {
  return Bx * gens.XU + By * gens.YU + Bz * gens.ZU + gens.KU;
}

Mat4 PulseSpec::matrix(const GeneratorSet& gens) const { return generator(gens) * tau; }

std::vector<AlgebraElement> ControlBasis::algebra_elements() const {
  std::vector<AlgebraElement> out;
  out.reserve(elements.size());
  for (const auto& e : elements) {
    AlgebraElement a;
    a.matrix = e.matrix;
    a.coords = e.coords;
    a.label = e.label;
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

ControlElement conjugated(const GeneratorSet& gens, std::vector<PulseSpec> conj,
                          const PulseSpec& core, const std::string& label) {
  ControlElement e;
  e.conjugators = std::move(conj);
  e.core = core;
  e.label = label;
  Mat4 m = core.matrix(gens);
  for (auto it = e.conjugators.rbegin(); it != e.conjugators.rend(); ++it) {
    const Mat4 g = mat_exp(it->matrix(gens));
    m = g * m * g.adjoint();
  }
  e.matrix = m;
  e.coords = vectorize(m);
  return e;
}

}  // namespace

ControlBasis build_control_basis(const GeneratorSet& gens, const ControlParams& p,
                                 double rank_tol) {
  p.validate();
  ControlBasis basis;
  basis.gens = gens;
  auto& el = basis.elements;
  el.reserve(15);

  const PulseSpec core4{0, 0, 0, p.t4};
  el.push_back(conjugated(gens, {}, {p.b1, 0, 0, p.t1}, "H1"));
  el.push_back(conjugated(gens, {}, {0, p.b2, 0, p.t2}, "H2"));
  el.push_back(conjugated(gens, {}, {0, 0, p.b3, p.t3}, "H3"));
  el.push_back(conjugated(gens, {}, core4, "H4"));
  el.push_back(conjugated(gens, {{p.b5, 0, 0, p.t5}}, core4, "H5"));
  el.push_back(conjugated(gens, {{p.b6, 0, 0, p.t6}}, core4, "H6"));
  el.push_back(conjugated(gens, {{0, 0, 0, p.t7}}, {p.b1, 0, 0, p.t1}, "H7"));
  el.push_back(conjugated(gens, {{0, p.b8, 0, p.t8}}, core4, "H8"));
  el.push_back(conjugated(gens, {{0, p.b9, 0, p.t9}}, core4, "H9"));
  el.push_back(conjugated(gens, {{0, 0, 0, p.t10}}, {0, p.b2, 0, p.t2}, "H10"));
  el.push_back(conjugated(gens, {{0, 0, p.b11, p.t11}}, core4, "H11"));
  el.push_back(conjugated(gens, {{0, 0, p.b12, p.t12}}, core4, "H12"));
  el.push_back(conjugated(gens, {{p.b13, 0, 0, p.t13}, {0, p.c13, 0, p.s13}}, core4, "H13"));
  el.push_back(conjugated(gens, {{0, p.b14, 0, p.t14}, {0, 0, p.c14, p.s14}}, core4, "H14"));
  el.push_back(conjugated(gens, {{0, 0, p.b15, p.t15}, {p.c15, 0, 0, p.s15}}, core4, "H15"));

  std::vector<Vec16> rows;
  rows.reserve(15);
  for (int r = 0; r < 15; ++r) {
    basis.stacked_coords.row(r) = el[r].coords.transpose();
    rows.push_back(el[r].coords);
  }
  const SingularSummary s = condition_number(rows);
  basis.sigma_max = s.sigma_max;
  basis.sigma_min = s.sigma_min;
  basis.cond = s.cond;
  if (s.sigma_min <= rank_tol * s.sigma_max) throw DegenerateBasisError(s.sigma_min);
  return basis;
}

ControlParams optimize_params(const GeneratorSet& gens, const ControlParams& initial,
                              const OptimizeOptions& options) {
  auto objective = [&](const ControlParams& p) -> double {
    try {
      return build_control_basis(gens, p).cond;
    } catch (const ValidationError&) {
      return std::numeric_limits<double>::infinity();
    } catch (const DegenerateBasisError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  ControlParams cur = initial;
  double f = objective(cur);
  if (!std::isfinite(f)) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> field(-2.0, 2.0), dur(0.1, 1.4);
    int restart = 0;
    for (; restart < options.max_restarts && !std::isfinite(f); ++restart) {
      ControlParams trial;  // start from defaults, jitter everything
      auto ptrs = trial.flat();
      const auto& nm = ControlParams::names();
      for (size_t i = 0; i < ptrs.size(); ++i)
        *ptrs[i] = (nm[i][0] == 'b' || nm[i][0] == 'c') ? field(rng) : dur(rng);
      f = objective(trial);
      if (std::isfinite(f)) cur = trial;
    }
    if (!std::isfinite(f))
      throw NumericError("optimize_params: no rank-15 seed found in " +
                         std::to_string(options.max_restarts) + " restarts");
  }

  std::array<double, 33> step;
  step.fill(options.initial_step);
  for (int pass = 0; pass < options.max_passes; ++pass) {
    bool any_improved = false;
    auto ptrs = cur.flat();
    for (size_t i = 0; i < ptrs.size(); ++i) {
      bool accepted = false;
      for (double sign : {+1.0, -1.0}) {
        ControlParams trial = cur;
        *trial.flat()[i] = *ptrs[i] + sign * step[i];
        const double ft = objective(trial);
        if (ft < f - options.improve_tol) {
          cur = trial;
          f = ft;
          ptrs = cur.flat();
          accepted = true;
          any_improved = true;
          break;
        }
      }
      if (!accepted) step[i] *= 0.5;
    }
    if (!any_improved &&
        *std::max_element(step.begin(), step.end()) < options.improve_tol)
      break;
  }
  return cur;
}

Components components_in_basis(const Mat4& X, const ControlBasis& basis, double tol) {
  const Vec16 w = vectorize(X);
  const Eigen::MatrixXd A = basis.stacked_coords.transpose();  // 16 x 15
  Components out;
  out.x = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(w);
  out.residual = (A * out.x - w).norm();
  if (out.residual > tol * std::max(1.0, w.norm()))
    throw ValidationError("components_in_basis: matrix is outside the basis span");
  return out;
}

}  // namespace liesynth
