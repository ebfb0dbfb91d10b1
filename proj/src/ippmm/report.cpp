#include "pmm/ippmm.hpp"

#include <json.hpp>

namespace pmm::ippmm {

std::string SolveReport::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["status"] = to_string(status);
  j["iters"] = iterations;
  j["primal_inf"] = primal_inf;
  j["dual_inf"] = dual_inf;
  j["mu"] = mu;
  j["time_s"] = time_seconds;
  j["inner_iters"] = inner_iterations;
  j["objective"] = objective;
  j["linear_solver"] = linear_solver;
  j["inexact_directions"] = inexact_directions;
  j["initial_dimension"] = initial_dimension;
  j["final_dimension"] = final_dimension;
  j["phase_times"] = {{"assembly", time_assembly},
                      {"factor", time_factor},
                      {"solve", time_solve},
                      {"dropping", time_dropping}};
  j["history"] = {{"primal_inf", primal_history},
                  {"dual_inf", dual_history},
                  {"mu", mu_history},
                  {"inner_iters", inner_history}};
  nlohmann::ordered_json drops = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < drop_audit.dropped.size(); ++k) {
    drops.push_back({{"index", drop_audit.dropped[k].index},
                     {"iteration", drop_audit.dropped[k].iteration},
                     {"z", k < std::size_t(drop_audit.z_dropped.size())
                               ? drop_audit.z_dropped[Index(k)]
                               : 0.0}});
  }
  j["drop_audit"] = {{"count", drop_audit.dropped.size()},
                     {"dropped", drops},
                     {"violated", drop_audit.violated}};
  if (!message.empty()) j["message"] = message;
  return j.dump(indent);
}

}  // namespace pmm::ippmm
