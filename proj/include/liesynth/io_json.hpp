#ifndef LIESYNTH_IO_JSON_HPP
#define LIESYNTH_IO_JSON_HPP

#include <string>

#include "liesynth/lie_closure.hpp"
#include "liesynth/pulse_synth.hpp"

namespace liesynth {

struct JsonOptions {
  bool timestamp = true;  // suppressible for byte-identical reruns
};

/// Closure basis file: labels, 16-coordinate vectors and (when tracked)
/// generator-index recipes. Shares the recipe shape with the schedule file.
void write_basis_json(const ClosureResult& result,
                      const std::vector<AlgebraElement>& generators,
                      const std::string& path, const JsonOptions& options = {});

/// Control basis file: the pulse recipes of H_1..H_15 plus conditioning info.
void write_control_basis_json(const ControlBasis& basis, const std::string& path,
                              const JsonOptions& options = {});

void write_schedule_json(const PulseSchedule& schedule, const std::string& path,
                         const JsonOptions& options = {});
PulseSchedule read_schedule_json(const std::string& path);

void write_params_json(const ControlParams& params, const std::string& path,
                       const JsonOptions& options = {});
ControlParams read_params_json(const std::string& path);

/// 4x4 complex matrix file: 4 rows of 4 "re,im" pairs (whitespace separated).
Mat4 read_matrix_file(const std::string& path);

}  // namespace liesynth

#endif
