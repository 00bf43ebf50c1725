#include "liesynth/lie_closure.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace liesynth {

AlgebraElement make_element(const Mat4& matrix, const std::string& label, double tol) {
  const double scale = std::max(1.0, matrix.norm());
  if (!is_skew_hermitian(matrix, tol * scale))
    throw ValidationError("make_element: matrix is not skew-Hermitian: " + label);
  if (!is_traceless(matrix, tol * scale))
    throw ValidationError("make_element: matrix is not traceless: " + label);
  AlgebraElement e;
  e.matrix = matrix;
  e.coords = vectorize(matrix);
  e.label = label;
  return e;
}

Mat4 reconstruct_recipe(const Recipe& recipe, const std::vector<AlgebraElement>& generators) {
  Mat4 g = Mat4::Identity();
  for (const auto& step : recipe.conjugators) {
    const Mat4 e = mat_exp(step.duration * generators.at(step.generator).matrix);
    g = g * e;
  }
  const Mat4 core = recipe.core_scale * generators.at(recipe.core_generator).matrix;
  return g * core * g.adjoint();
}

namespace {

// Incremental span tracker over the 16-dim coordinates with re-orthogonalized
// Gram-Schmidt; accepts a vector only if its residual is above tol relative
// to the largest norm seen.
class SpanTracker {
 public:
  explicit SpanTracker(double tol) : tol_(tol) {}

  bool accept(const Vec16& v) {
    max_norm_ = std::max(max_norm_, v.norm());
    Vec16 r = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : ortho_) r -= q.dot(r) * q;
    if (r.norm() <= tol_ * max_norm_) return false;
    ortho_.push_back(r / r.norm());
    return true;
  }

  int dim() const { return static_cast<int>(ortho_.size()); }

 private:
  double tol_;
  double max_norm_ = 0.0;
  std::vector<Vec16> ortho_;
};

AlgebraElement normalized(const AlgebraElement& e, const std::string& label) {
  const double n = e.matrix.norm();
  AlgebraElement out;
  out.matrix = e.matrix / n;
  out.coords = e.coords / n;
  out.label = label;
  return out;
}

}  // namespace

std::vector<AlgebraElement> ad_orbit(const AlgebraElement& X, const AlgebraElement& Y,
                                     double tol) {
  std::vector<AlgebraElement> orbit;
  SpanTracker span(tol);
  Mat4 cur = Y.matrix;
  for (int power = 0; power < 16; ++power) {
    const double n = cur.norm();
    if (n < 1e-300) break;
    const Vec16 v = vectorize(cur) / n;
    if (!span.accept(v)) break;
    AlgebraElement e;
    e.matrix = cur / n;  // normalized: ad powers grow geometrically
    e.coords = v;
    e.label = Y.label + (power ? ":ad^" + std::to_string(power) : "");
    orbit.push_back(e);
    cur = X.matrix * e.matrix - e.matrix * X.matrix;
  }
  return orbit;
}

namespace {

double stack_sigma_min(const AlgebraElement& X, const AlgebraElement& Y,
                       const std::vector<double>& s) {
  std::vector<Vec16> rows;
  rows.reserve(s.size());
  for (double si : s) {
    const Mat4 g = mat_exp(si * X.matrix);
    const Mat4 m = g * Y.matrix * g.adjoint();
    rows.push_back(vectorize(m) / m.norm());
  }
  return condition_number(rows).sigma_min;
}

}  // namespace

namespace {

bool stack_independent(const AlgebraElement& X, const AlgebraElement& Y,
                       const std::vector<double>& s, double tol) {
  std::vector<Vec16> rows;
  rows.reserve(s.size());
  for (double si : s) {
    const Mat4 g = mat_exp(si * X.matrix);
    const Mat4 m = g * Y.matrix * g.adjoint();
    rows.push_back(vectorize(m) / m.norm());
  }
  return independent_subset(rows, tol).size() == s.size();
}

}  // namespace

std::vector<double> select_sample_points(const AlgebraElement& X, const AlgebraElement& Y,
                                         int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("select_sample_points: n must be positive");
  if (n == 1) return {0.0};

  const double indep_tol = 1e-9;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int max_restarts = 8;
  std::vector<double> best;
  double best_sigma = -1.0;

  for (int restart = 0; restart < max_restarts; ++restart) {
    std::vector<double> s(n);
    for (auto& v : s) v = unif(rng);
    std::sort(s.begin(), s.end());
    double sigma = stack_sigma_min(X, Y, s);
    // coordinate descent on each sample point
    double step = 0.25;
    while (step > 1e-2) {
      bool improved = false;
      for (int i = 0; i < n; ++i) {
        for (double delta : {step, -step}) {
          std::vector<double> trial = s;
          trial[i] = std::clamp(trial[i] + delta, -1.0, 1.0);
          const double f = stack_sigma_min(X, Y, trial);
          if (f > sigma * (1.0 + 1e-9)) {
            s = trial;
            sigma = f;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (sigma > best_sigma) {
      best_sigma = sigma;
      best = s;
    }
    // the contract is independence of the sampled stack; sigma_min is only
    // the search objective (ill-conditioned spans keep it legitimately tiny)
    if (stack_independent(X, Y, best, indep_tol)) {
      std::sort(best.begin(), best.end());
      return best;
    }
  }
  throw NumericError(
      "select_sample_points: could not reach an independent sample set; "
      "the requested count likely exceeds the orbit dimension");
}

ClosureResult closure(const std::vector<AlgebraElement>& generators,
                      const ClosureOptions& options) {
  if (generators.empty()) throw ValidationError("closure: no generators");
  for (const auto& g : generators) {
    if (g.matrix.rows() != 4) throw ValidationError("closure: inconsistent dimensions");
    const double scale = std::max(1.0, g.matrix.norm());
    if (!is_skew_hermitian(g.matrix, 1e-9 * scale))
      throw ValidationError("closure: generator is not skew-Hermitian");
  }

  ClosureResult out;
  std::vector<RealizableElement> tracked;
  SpanTracker span(options.tol);

  auto add = [&](const AlgebraElement& e, const Recipe& r, const std::string& why) {
    AlgebraElement norm = normalized(e, e.label);
    if (!span.accept(norm.coords)) return false;
    out.basis.push_back(e);
    if (options.track_recipes) tracked.push_back({e, r, why});
    return true;
  };

  for (int i = 0; i < static_cast<int>(generators.size()); ++i) {
    Recipe r;
    r.core_generator = i;
    r.core_scale = 1.0;
    AlgebraElement e = generators[i];
    if (e.label.empty()) e.label = "g" + std::to_string(i);
    add(e, r, "generator");
  }

  // Expands element j's recipe into a conjugator pulse list scaled by s:
  // exp(s * elem) = conj .. core(s * core_scale) .. conj^-1.
  auto as_conjugators = [&](int j, double s) {
    std::vector<RecipeStep> steps;
    if (options.track_recipes) {
      const Recipe& rj = tracked[j].recipe;
      steps = rj.conjugators;
      steps.push_back({rj.core_generator, s * rj.core_scale});
      for (auto it = rj.conjugators.rbegin(); it != rj.conjugators.rend(); ++it)
        steps.push_back({it->generator, -it->duration});
    }
    return steps;
  };

  bool done = false;
  while (!done) {
    ++out.iterations;
    const int length_before = static_cast<int>(out.basis.size());
    for (int j = 0; j < static_cast<int>(out.basis.size()); ++j) {
      for (int k = j; k < static_cast<int>(out.basis.size()); ++k) {
        const AlgebraElement& X = out.basis[j];
        const AlgebraElement& Y = out.basis[k];
        const auto orbit = ad_orbit(X, Y, options.tol);
        const int n = static_cast<int>(orbit.size());
        if (n <= 1) continue;
        const auto samples = select_sample_points(X, Y, n, options.seed);
        for (double s : samples) {
          const Mat4 g = mat_exp(s * X.matrix);
          const Mat4 m = g * Y.matrix * g.adjoint();
          AlgebraElement e;
          e.matrix = m;
          e.coords = vectorize(m);
          e.label = "Ad(exp(" + std::to_string(s) + "*" + X.label + "))" + Y.label;
          Recipe r;
          if (options.track_recipes) {
            const Recipe& ry = tracked[k].recipe;
            r.conjugators = as_conjugators(j, s);
            r.conjugators.insert(r.conjugators.end(), ry.conjugators.begin(),
                                 ry.conjugators.end());
            r.core_generator = ry.core_generator;
            r.core_scale = ry.core_scale;
          }
          add(e, r, "orbit(" + X.label + "," + Y.label + ")");
        }
      }
    }
    done = static_cast<int>(out.basis.size()) == length_before;
    if (out.iterations > 16) throw NumericError("closure: failed to stabilize");
  }

  out.dim = static_cast<int>(out.basis.size());
  if (options.track_recipes) out.realizable = std::move(tracked);
  return out;
}

ClosureResult closure_abstract(const std::vector<AlgebraElement>& generators, double tol) {
  if (generators.empty()) throw ValidationError("closure_abstract: no generators");
  ClosureResult out;
  SpanTracker span(tol);

  auto add = [&](const Mat4& m, const std::string& label) {
    const double n = m.norm();
    if (n < 1e-300) return false;
    const Vec16 v = vectorize(m) / n;
    if (!span.accept(v)) return false;
    AlgebraElement e;
    e.matrix = m / n;
    e.coords = v;
    e.label = label;
    out.basis.push_back(e);
    return true;
  };

  for (int i = 0; i < static_cast<int>(generators.size()); ++i)
    add(generators[i].matrix,
        generators[i].label.empty() ? "g" + std::to_string(i) : generators[i].label);

  bool done = false;
  while (!done) {
    ++out.iterations;
    const int before = static_cast<int>(out.basis.size());
    for (int j = 0; j < static_cast<int>(out.basis.size()); ++j)
      for (int k = j + 1; k < static_cast<int>(out.basis.size()); ++k) {
        const Mat4 br =
            out.basis[j].matrix * out.basis[k].matrix - out.basis[k].matrix * out.basis[j].matrix;
        add(br, "[" + out.basis[j].label + "," + out.basis[k].label + "]");
      }
    done = static_cast<int>(out.basis.size()) == before;
    if (out.iterations > 16) throw NumericError("closure_abstract: failed to stabilize");
  }
  out.dim = static_cast<int>(out.basis.size());
  return out;
}

double bracket_closure_residual(const std::vector<AlgebraElement>& basis) {
  std::vector<Vec16> rows;
  for (const auto& e : basis) rows.push_back(e.coords / e.coords.norm());
  // orthonormalize the span
  std::vector<Vec16> ortho;
  for (auto v : rows) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : ortho) v -= q.dot(v) * q;
    if (v.norm() > 1e-12) ortho.push_back(v / v.norm());
  }
  double worst = 0.0;
  for (size_t j = 0; j < basis.size(); ++j)
    for (size_t k = j + 1; k < basis.size(); ++k) {
      const Mat4 br = basis[j].matrix * basis[k].matrix - basis[k].matrix * basis[j].matrix;
      const double n = br.norm();
      if (n < 1e-14) continue;
      Vec16 v = vectorize(br) / n;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : ortho) v -= q.dot(v) * q;
      worst = std::max(worst, v.norm());
    }
  return worst;
}

}  // namespace liesynth
