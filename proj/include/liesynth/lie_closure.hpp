#ifndef LIESYNTH_LIE_CLOSURE_HPP
#define LIESYNTH_LIE_CLOSURE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liesynth/matrix_core.hpp"

namespace liesynth {

/// A traceless skew-Hermitian 4x4 matrix together with its coordinates over
/// the quaternion tensor basis.
struct AlgebraElement {
  Mat4 matrix;
  Vec16 coords;
  std::string label;
};

/// Builds an element, checking skew-Hermiticity and tracelessness.
AlgebraElement make_element(const Mat4& matrix, const std::string& label = "",
                            double tol = 1e-10);

/// One conjugating pulse of a realizability recipe: exp(duration * generator).
struct RecipeStep {
  int generator;    // index into the closure's generator list
  double duration;  // in the generator's own parameter
};

/// element = Ad(exp(step_1)) ... Ad(exp(step_m)) (core_scale * generator_core).
struct Recipe {
  std::vector<RecipeStep> conjugators;
  int core_generator = 0;
  double core_scale = 1.0;
};

struct RealizableElement {
  AlgebraElement element;
  Recipe recipe;
  std::string provenance;
};

/// Re-evaluates a recipe against the generator list.
Mat4 reconstruct_recipe(const Recipe& recipe, const std::vector<AlgebraElement>& generators);

struct ClosureResult {
  std::vector<AlgebraElement> basis;
  int dim = 0;
  int iterations = 0;
  std::optional<std::vector<RealizableElement>> realizable;
};

/// The maximal independent prefix of {Y, ad(X)Y, ad(X)^2 Y, ...}.
std::vector<AlgebraElement> ad_orbit(const AlgebraElement& X, const AlgebraElement& Y,
                                     double tol = 1e-9);

/// n distinct reals s_i in [-1,1] such that {exp(s_i ad(X)) Y} is linearly
/// independent; found by seeded random starts plus coordinate-descent
/// maximization of the smallest singular value of the stacked vectorizations.
std::vector<double> select_sample_points(const AlgebraElement& X, const AlgebraElement& Y,
                                         int n, std::uint64_t seed = 0);

struct ClosureOptions {
  double tol = 1e-9;
  bool track_recipes = false;
  std::uint64_t seed = 0;
};

/// Grows a basis of the smallest Lie algebra containing the generators using
/// conjugation orbits exp(s ad(X)) Y, so every appended element remains a
/// conjugated generator (and carries a recipe when track_recipes is set).
ClosureResult closure(const std::vector<AlgebraElement>& generators,
                      const ClosureOptions& options = {});

/// Bracket-saturation engine: repeatedly adds independent pairwise brackets.
/// Faster than closure() and spans the same algebra, but its elements are not
/// conjugated generators. Intended for dimension queries and as an oracle.
ClosureResult closure_abstract(const std::vector<AlgebraElement>& generators,
                               double tol = 1e-9);

/// Largest residual of any pairwise bracket against the span of the basis;
/// zero (to tolerance) certifies bracket-closedness.
double bracket_closure_residual(const std::vector<AlgebraElement>& basis);

}  // namespace liesynth

#endif
