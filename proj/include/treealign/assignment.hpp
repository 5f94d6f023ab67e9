#ifndef TREEALIGN_ASSIGNMENT_HPP
#define TREEALIGN_ASSIGNMENT_HPP

#include <Eigen/Core>
#include <limits>
#include <vector>

namespace treealign {

// Maximum-weight assignment on a dense rectangular weight matrix, via the
// O(n^2 m) shortest-augmenting-path Hungarian method with potentials.
// Returns, for every row, the assigned column or -1. Every row is assigned
// when rows <= cols (and vice versa), so with non-negative weights this is
// also a maximum-weight matching.
template <typename Derived>
std::vector<Eigen::Index> max_weight_assignment(const Eigen::MatrixBase<Derived>& weights) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index rows = weights.rows();
  const Eigen::Index cols = weights.cols();
  std::vector<Eigen::Index> row_to_col(static_cast<std::size_t>(rows), -1);
  if (rows == 0 || cols == 0) return row_to_col;

  // Work on an n x m cost matrix with n <= m.
  const bool transposed = rows > cols;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cost =
      transposed ? Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(-weights.transpose())
                 : Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(-weights);
  const Eigen::Index n = cost.rows();
  const Eigen::Index m = cost.cols();
  const Scalar inf = std::numeric_limits<Scalar>::infinity();

  // 1-based potentials; column 0 is the virtual source.
  std::vector<Scalar> u(n + 1, 0), v(m + 1, 0), minv(m + 1);
  std::vector<Eigen::Index> owner(m + 1, 0), way(m + 1, 0);
  std::vector<bool> used(m + 1);
  for (Eigen::Index i = 1; i <= n; ++i) {
    owner[0] = i;
    Eigen::Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const Eigen::Index i0 = owner[j0];
      Scalar delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const Scalar reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (Eigen::Index j = 1; j <= m; ++j) {
    if (owner[j] == 0) continue;
    const Eigen::Index r = owner[j] - 1;
    const Eigen::Index c = j - 1;
    if (transposed) {
      row_to_col[static_cast<std::size_t>(c)] = r;
    } else {
      row_to_col[static_cast<std::size_t>(r)] = c;
    }
  }
  return row_to_col;
}

}  // namespace treealign

#endif  // TREEALIGN_ASSIGNMENT_HPP
