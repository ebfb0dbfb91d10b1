#pragma once

#include "pmm/ippmm.hpp"

namespace pmm::dropping {

// Moves every j in I \ V with x_j <= eps, z_j >= xi*eps and |(r_d)_j| <= eps
// into V and sets x_j = 0. `grad` is ∇f at state.x. Returns the number of
// newly dropped variables.
Index scan_and_drop(ippmm::IpPmmState& state, const ippmm::ConvexProgram& program, const Vec& grad,
                    double eps_drop, double xi);

// z_V = (∇f(x) - Aᵀy)_V at the expanded final point; flags z_j <= 0.
ippmm::DropAudit verify_dropped(const Vec& x, const Vec& y, const ippmm::ConvexProgram& program,
                                const std::vector<ippmm::DropRecord>& dropped);

// Inserts zeros at the dropped positions. `dropped` must be distinct, in range.
Vec expand_solution(const Vec& reduced, const std::vector<Index>& dropped, Index n);
Vec restrict_solution(const Vec& full, const std::vector<Index>& dropped);

}  // namespace pmm::dropping
