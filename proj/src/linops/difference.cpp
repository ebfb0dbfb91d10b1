#include "pmm/linops.hpp"

#include <utility>

namespace pmm::linops {

DifferenceOperator::DifferenceOperator(std::vector<Index> grid, std::string label, SpMat m)
    : grid_(std::move(grid)), label_(std::move(label)), m_(std::move(m)) {
  m_.makeCompressed();
}

void DifferenceOperator::apply_impl(const Vec& v, Vec& out) const { out.noalias() = m_ * v; }

void DifferenceOperator::apply_transpose_impl(const Vec& u, Vec& out) const {
  out.noalias() = m_.transpose() * u;
}

std::shared_ptr<DifferenceOperator> make_difference_operator(Index num_periods, Index num_assets) {
  if (num_periods < 2) throw InvalidArgument("difference operator needs at least 2 periods");
  if (num_assets < 1) throw InvalidArgument("difference operator needs at least 1 asset");
  const Index s = num_assets;
  const Index l = (num_periods - 1) * s;
  std::vector<Triplet> t;
  t.reserve(2 * l);
  for (Index j = 0; j + 1 < num_periods; ++j)
    for (Index i = 0; i < s; ++i) {
      int row = int(j * s + i);
      t.emplace_back(row, int(j * s + i), -1.0);
      t.emplace_back(row, int((j + 1) * s + i), 1.0);
    }
  SpMat m(l, num_periods * s);
  m.setFromTriplets(t.begin(), t.end());
  return std::make_shared<DifferenceOperator>(std::vector<Index>{num_periods, num_assets},
                                              "portfolio", std::move(m));
}

std::shared_ptr<DifferenceOperator> make_tv_operator(const std::vector<Index>& grid) {
  if (grid.empty() || grid.size() > 3) throw InvalidArgument("tv operator: grid must be 1D, 2D or 3D");
  for (Index q : grid)
    if (q < 2) throw InvalidArgument("tv operator: every grid dimension must be >= 2");

  const std::size_t d = grid.size();
  std::vector<Index> stride(d, 1);
  for (std::size_t k = d - 1; k > 0; --k) stride[k - 1] = stride[k] * grid[k];
  Index q = stride[0] * grid[0];

  std::vector<Triplet> t;
  Index row = 0;
  std::vector<Index> p(d);
  for (std::size_t dir = 0; dir < d; ++dir) {
    for (Index idx = 0; idx < q; ++idx) {
      Index rem = idx;
      for (std::size_t k = 0; k < d; ++k) {
        p[k] = rem / stride[k];
        rem %= stride[k];
      }
      if (p[dir] + 1 >= grid[dir]) continue;
      t.emplace_back(int(row), int(idx), -1.0);
      t.emplace_back(int(row), int(idx + stride[dir]), 1.0);
      ++row;
    }
  }
  SpMat m(row, q);
  m.setFromTriplets(t.begin(), t.end());
  return std::make_shared<DifferenceOperator>(grid, "tv", std::move(m));
}

}  // namespace pmm::linops
