#include "pmm/dropping.hpp"

#include <algorithm>
#include <cmath>

namespace pmm::dropping {

Index scan_and_drop(ippmm::IpPmmState& state, const ippmm::ConvexProgram& program, const Vec& grad,
                    double eps_drop, double xi) {
  Vec rd = grad - program.A.transpose() * state.y - state.z;
  Index count = 0;
  for (Index j = 0; j < program.n(); ++j) {
    if (!program.nonneg[j] || state.dropped[j]) continue;
    if (state.x[j] <= eps_drop && state.z[j] >= xi * eps_drop && std::abs(rd[j]) <= eps_drop) {
      state.dropped[j] = 1;
      state.x[j] = 0.0;
      state.drop_log.push_back({j, state.k});
      ++count;
    }
  }
  return count;
}

ippmm::DropAudit verify_dropped(const Vec& x, const Vec& y, const ippmm::ConvexProgram& program,
                                const std::vector<ippmm::DropRecord>& dropped) {
  ippmm::DropAudit audit;
  audit.dropped = dropped;
  audit.z_dropped.resize(Index(dropped.size()));
  if (dropped.empty()) return audit;
  Vec zfull = program.objective->gradient(x) - program.A.transpose() * y;
  for (std::size_t k = 0; k < dropped.size(); ++k) {
    double z = zfull[dropped[k].index];
    audit.z_dropped[Index(k)] = z;
    if (!(z > 0.0)) audit.violated.push_back(dropped[k].index);
  }
  return audit;
}

Vec expand_solution(const Vec& reduced, const std::vector<Index>& dropped, Index n) {
  if (reduced.size() + Index(dropped.size()) != n)
    throw InvalidArgument("expand_solution: sizes do not add up");
  std::vector<char> mask(std::size_t(n), 0);
  for (Index j : dropped) {
    if (j < 0 || j >= n || mask[std::size_t(j)])
      throw InvalidArgument("expand_solution: dropped indices must be distinct and in range");
    mask[std::size_t(j)] = 1;
  }
  Vec out = Vec::Zero(n);
  Index k = 0;
  for (Index j = 0; j < n; ++j)
    if (!mask[std::size_t(j)]) out[j] = reduced[k++];
  return out;
}

Vec restrict_solution(const Vec& full, const std::vector<Index>& dropped) {
  std::vector<char> mask(std::size_t(full.size()), 0);
  for (Index j : dropped) {
    if (j < 0 || j >= full.size()) throw InvalidArgument("restrict_solution: index out of range");
    mask[std::size_t(j)] = 1;
  }
  Vec out(full.size() - Index(std::count(mask.begin(), mask.end(), char(1))));
  Index k = 0;
  for (Index j = 0; j < full.size(); ++j)
    if (!mask[std::size_t(j)]) out[k++] = full[j];
  return out;
}

}  // namespace pmm::dropping
