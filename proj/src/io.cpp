#include "ppt/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace ppt {
namespace {

std::string hex_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double coordinate_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
      throw Error(ErrorKind::parse, "coordinate string '" + s + "' is not a finite float");
    }
    return v;
  }
  throw Error(ErrorKind::parse, "coordinate must be a number or a hexadecimal float string");
}

}  // namespace

Json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan") return std::nan("");
  }
  throw Error(ErrorKind::parse, "expected a number, got " + j.dump());
}

Json configuration_to_json(const Configuration& omega, bool hex_floats) {
  Json atoms = Json::array();
  for (std::size_t i = 0; i < omega.size(); ++i) {
    Json atom = Json::array();
    for (double c : omega.atom(i)) {
      if (hex_floats) {
        atom.push_back(hex_float(c));
      } else {
        atom.push_back(c);
      }
    }
    atoms.push_back(std::move(atom));
  }
  return atoms;
}

Configuration configuration_from_json(const Json& j, std::size_t dim) {
  if (!j.is_array()) throw Error(ErrorKind::parse, "configuration must be an array of coordinate arrays");
  if (j.empty()) return Configuration(dim == 0 ? 1 : dim);
  std::size_t d = dim;
  std::vector<double> flat;
  for (const auto& atom : j) {
    if (!atom.is_array() || atom.empty()) {
      throw Error(ErrorKind::parse, "each atom must be a nonempty coordinate array");
    }
    if (d == 0) d = atom.size();
    if (atom.size() != d) {
      throw Error(ErrorKind::parse, "atom " + atom.dump() + " does not have dimension " + std::to_string(d));
    }
    for (const auto& c : atom) flat.push_back(coordinate_from_json(c));
  }
  return Configuration(d, std::move(flat));
}

Json seed_to_json(const SeedSpec& s) { return Json{{"seed", s.seed}, {"stream_id", s.stream_id}}; }

Json estimate_to_json(const Estimate& e) {
  return Json{{"mean", number_to_json(e.mean)},
              {"std_error", number_to_json(e.std_error)},
              {"n_samples", e.n_samples},
              {"seed", seed_to_json(e.seed)}};
}

Json bound_to_json(const BoundResult& b) {
  Json j{{"value", number_to_json(b.value)},
         {"method", std::string(to_string(b.method))},
         {"std_error", number_to_json(b.std_error)},
         {"n_samples", b.n_samples},
         {"seed", seed_to_json(b.seed)},
         {"inputs_digest", b.inputs_digest},
         {"notes", b.notes}};
  if (b.truncation_estimate) j["truncation_estimate"] = number_to_json(*b.truncation_estimate);
  return j;
}

Json plan_to_json(const TransportPlan& plan) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < plan.rows; ++i) {
    for (std::size_t j = 0; j < plan.cols; ++j) {
      const double w = plan.weight(i, j);
      if (w > 0.0) entries.push_back(Json::array({i, j, w}));
    }
  }
  return Json{{"rows", plan.rows},
              {"cols", plan.cols},
              {"cost", number_to_json(plan.cost.value())},
              {"entries", std::move(entries)}};
}

}  // namespace ppt
