#include "liesynth/io_json.hpp"

#include <chrono>
#include <fstream>
#include <json.hpp>

namespace liesynth {

namespace {

using nlohmann::json;

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

void dump_to(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

json load_from(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("bad JSON in " + path + ": " + e.what());
  }
  return j;
}

json coords_to_json(const Vec16& c) {
  json a = json::array();
  for (int i = 0; i < 16; ++i) a.push_back(c(i));
  return a;
}

}  // namespace

void write_basis_json(const ClosureResult& result,
                      const std::vector<AlgebraElement>& generators,
                      const std::string& path, const JsonOptions& options) {
  json j;
  if (options.timestamp) j["generated_at"] = now_iso8601();
  j["dim"] = result.dim;
  j["iterations"] = result.iterations;
  json gens = json::array();
  for (const auto& g : generators)
    gens.push_back({{"label", g.label}, {"coords", coords_to_json(g.coords)}});
  j["generators"] = gens;
  json elems = json::array();
  for (size_t i = 0; i < result.basis.size(); ++i) {
    json e;
    e["label"] = result.basis[i].label;
    e["coords"] = coords_to_json(result.basis[i].coords);
    if (result.realizable) {
      const Recipe& r = (*result.realizable)[i].recipe;
      json conj = json::array();
      for (const auto& s : r.conjugators)
        conj.push_back({{"generator", s.generator}, {"duration", s.duration}});
      e["recipe"] = {{"conjugators", conj},
                     {"core", {{"generator", r.core_generator}, {"scale", r.core_scale}}}};
    }
    elems.push_back(e);
  }
  j["elements"] = elems;
  dump_to(j, path);
}

void write_control_basis_json(const ControlBasis& basis, const std::string& path,
                              const JsonOptions& options) {
  json j;
  if (options.timestamp) j["generated_at"] = now_iso8601();
  j["sigma_max"] = basis.sigma_max;
  j["sigma_min"] = basis.sigma_min;
  j["cond"] = basis.cond;
  json elems = json::array();
  for (const auto& e : basis.elements) {
    json conj = json::array();
    for (const auto& s : e.conjugators)
      conj.push_back({{"Bx", s.Bx}, {"By", s.By}, {"Bz", s.Bz}, {"duration", s.tau}});
    elems.push_back({{"label", e.label},
                     {"coords", coords_to_json(e.coords)},
                     {"recipe",
                      {{"conjugators", conj},
                       {"core",
                        {{"Bx", e.core.Bx}, {"By", e.core.By}, {"Bz", e.core.Bz},
                         {"scale", e.core.tau}}}}}});
  }
  j["elements"] = elems;
  dump_to(j, path);
}

void write_schedule_json(const PulseSchedule& schedule, const std::string& path,
                         const JsonOptions& options) {
  json j;
  if (options.timestamp) j["generated_at"] = now_iso8601();
  j["n"] = schedule.n;
  j["per_cycle_stages"] = schedule.per_cycle_stages;
  j["rms_error"] = schedule.rms_error;
  j["total_time_ns"] = schedule.total_time_ns;
  j["gross_time_ns"] = schedule.gross_time_ns;
  j["global_phase"] = {schedule.global_phase.real(), schedule.global_phase.imag()};
  j["cap_violations"] = schedule.cap_violations;
  json stages = json::array();
  for (const auto& s : schedule.stages) {
    json st = {{"Bx_mT", s.Bx_mT},
               {"By_mT", s.By_mT},
               {"Bz_mT", s.Bz_mT},
               {"duration_ns", s.duration_ns},
               {"kind", s.kind == PulseStage::Kind::Idle ? "idle" : "field"}};
    if (s.signed_flag) st["signed"] = true;
    stages.push_back(st);
  }
  j["stages"] = stages;
  json tgt = json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      tgt.push_back({schedule.target(r, c).real(), schedule.target(r, c).imag()});
  j["target"] = tgt;
  dump_to(j, path);
}

PulseSchedule read_schedule_json(const std::string& path) {
  const json j = load_from(path);
  PulseSchedule s;
  try {
    s.n = j.at("n").get<int>();
    s.per_cycle_stages = j.value("per_cycle_stages", 0);
    s.rms_error = j.value("rms_error", 0.0);
    s.total_time_ns = j.value("total_time_ns", 0.0);
    s.gross_time_ns = j.value("gross_time_ns", 0.0);
    if (j.contains("global_phase"))
      s.global_phase = Complex(j["global_phase"][0].get<double>(),
                               j["global_phase"][1].get<double>());
    if (j.contains("cap_violations"))
      s.cap_violations = j["cap_violations"].get<std::vector<std::string>>();
    for (const auto& st : j.at("stages")) {
      PulseStage p;
      p.Bx_mT = st.at("Bx_mT").get<double>();
      p.By_mT = st.at("By_mT").get<double>();
      p.Bz_mT = st.at("Bz_mT").get<double>();
      p.duration_ns = st.at("duration_ns").get<double>();
      p.kind = st.at("kind").get<std::string>() == "idle" ? PulseStage::Kind::Idle
                                                          : PulseStage::Kind::Field;
      p.signed_flag = st.value("signed", false);
      s.stages.push_back(p);
    }
    if (j.contains("target")) {
      const auto& tgt = j["target"];
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          const auto& e = tgt.at(4 * r + c);
          s.target(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
  } catch (const json::exception& e) {
    throw ValidationError("schedule schema error in " + path + ": " + e.what());
  }
  return s;
}

void write_params_json(const ControlParams& params, const std::string& path,
                       const JsonOptions& options) {
  json j;
  if (options.timestamp) j["generated_at"] = now_iso8601();
  const auto ptrs = params.flat();
  const auto& names = ControlParams::names();
  for (size_t i = 0; i < names.size(); ++i) j[names[i]] = *ptrs[i];
  dump_to(j, path);
}

ControlParams read_params_json(const std::string& path) {
  const json j = load_from(path);
  ControlParams p;
  auto ptrs = p.flat();
  const auto& names = ControlParams::names();
  for (size_t i = 0; i < names.size(); ++i) {
    if (!j.contains(names[i]))
      throw ValidationError(std::string("params file missing ") + names[i]);
    *ptrs[i] = j[names[i]].get<double>();
  }
  p.validate();
  return p;
}

Mat4 read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path);
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      std::string tok;
      if (!(in >> tok)) throw ValidationError("matrix file too short: " + path);
      const auto comma = tok.find(',');
      if (comma == std::string::npos)
        throw ValidationError("matrix entries must be re,im pairs: " + path);
      try {
        m(r, c) = Complex(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
      } catch (const std::exception&) {
        throw ValidationError("bad matrix entry '" + tok + "' in " + path);
      }
    }
  return m;
}

}  // namespace liesynth
