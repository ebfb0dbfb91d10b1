#include "pmm/baselines.hpp"

#include <json.hpp>

#include <cmath>

namespace pmm::baselines {

Vec soft_threshold(const Vec& v, double gamma) {
  if (gamma < 0) throw InvalidArgument("soft threshold: negative threshold");
  Vec out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    double a = std::abs(v[i]) - gamma;
    out[i] = a > 0 ? std::copysign(a, v[i]) : 0.0;
  }
  return out;
}

std::string FirstOrderReport::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["solver"] = solver;
  j["status"] = status;
  j["iters"] = iterations;
  j["primal_inf"] = primal_inf;
  j["objective"] = objective;
  j["time_s"] = time_seconds;
  j["factorizations"] = factorizations;
  j["history"] = {{"primal_inf", primal_history}, {"objective", objective_history}};
  if (!dual_history.empty()) j["history"]["dual_inf"] = dual_history;
  return j.dump(indent);
}

}  // namespace pmm::baselines
