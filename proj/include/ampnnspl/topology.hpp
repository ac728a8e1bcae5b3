#ifndef AMPNNSPL_TOPOLOGY_HPP
#define AMPNNSPL_TOPOLOGY_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ampnnspl {

enum class TopologyKind { Independent, FullSet, Chain1D, Grid2D, Custom };

inline const char* topology_name(TopologyKind k) {
  switch (k) {
    case TopologyKind::Independent: return "indep";
    case TopologyKind::FullSet: return "fullset";
    case TopologyKind::Chain1D: return "nnspl1d";
    case TopologyKind::Grid2D: return "nnspl2d";
    case TopologyKind::Custom: return "custom";
  }
  return "?";
}

/// Neighborhood map i -> N(i) used by the sparse-ratio update.
///
/// Chain1D and Grid2D exclude the element itself and are symmetric; chain
/// endpoints have one neighbor, grid edge/corner cells three or two.
/// FullSet maps every i to the whole index set (including i), which turns
/// the ratio update into a single shared mean. Independent maps i to {i},
/// which reproduces the plain per-element EM update.
class NeighborTopology {
 public:
  static NeighborTopology independent(int n) {
    return NeighborTopology(TopologyKind::Independent, check_size(n));
  }

  static NeighborTopology full_set(int n) {
    return NeighborTopology(TopologyKind::FullSet, check_size(n));
  }

  static NeighborTopology chain_1d(int n) {
    NeighborTopology t(TopologyKind::Chain1D, check_size(n));
    t.adj_.resize(n);
    for (int i = 0; i < n; ++i) {
      if (i > 0) t.adj_[i].push_back(i - 1);
      if (i + 1 < n) t.adj_[i].push_back(i + 1);
    }
    return t;
  }

  /// Row-major linearization: cell (q, l) is index q*cols + l.
  static NeighborTopology grid_2d(int rows, int cols) {
    if (rows < 1 || cols < 1) {
      throw std::invalid_argument("grid_2d: rows and cols must be positive");
    }
    NeighborTopology t(TopologyKind::Grid2D, rows * cols);
    t.rows_ = rows;
    t.cols_ = cols;
    t.adj_.resize(static_cast<std::size_t>(rows) * cols);
    for (int q = 0; q < rows; ++q) {
      for (int l = 0; l < cols; ++l) {
        auto& nbrs = t.adj_[static_cast<std::size_t>(q) * cols + l];
        if (q > 0) nbrs.push_back((q - 1) * cols + l);
        if (q + 1 < rows) nbrs.push_back((q + 1) * cols + l);
        if (l > 0) nbrs.push_back(q * cols + l - 1);
        if (l + 1 < cols) nbrs.push_back(q * cols + l + 1);
      }
    }
    return t;
  }

  static NeighborTopology custom(std::vector<std::vector<int>> adjacency) {
    const int n = static_cast<int>(adjacency.size());
    check_size(n);
    for (int i = 0; i < n; ++i) {
      for (int j : adjacency[i]) {
        if (j < 0 || j >= n) {
          throw std::invalid_argument("custom topology: neighbor index " +
                                      std::to_string(j) + " out of range for n=" +
                                      std::to_string(n));
        }
        if (j == i) {
          throw std::invalid_argument("custom topology: index " + std::to_string(i) +
                                      " lists itself as a neighbor");
        }
      }
    }
    NeighborTopology t(TopologyKind::Custom, n);
    t.adj_ = std::move(adjacency);
    return t;
  }

  TopologyKind kind() const { return kind_; }
  int size() const { return n_; }
  int grid_rows() const { return rows_; }
  int grid_cols() const { return cols_; }

  int neighbor_count(int i) const {
    switch (kind_) {
      case TopologyKind::Independent: return 1;
      case TopologyKind::FullSet: return n_;
      default: return static_cast<int>(adj_[i].size());
    }
  }

  /// Materialized neighbor list (FullSet and Independent are generated).
  std::vector<int> neighbors(int i) const {
    switch (kind_) {
      case TopologyKind::Independent: return {i};
      case TopologyKind::FullSet: {
        std::vector<int> all(n_);
        for (int j = 0; j < n_; ++j) all[j] = j;
        return all;
      }
      default: return adj_[i];
    }
  }

  const std::vector<std::vector<int>>& adjacency() const { return adj_; }

 private:
  NeighborTopology(TopologyKind kind, int n) : kind_(kind), n_(n) {}

  static int check_size(int n) {
    if (n < 1) throw std::invalid_argument("topology: n must be positive");
    return n;
  }

  TopologyKind kind_;
  int n_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::vector<int>> adj_;  // empty for Independent/FullSet
};

/// Builds the topology named by (kind, n, rows, cols); rows*cols must equal
/// n for Grid2D.
inline NeighborTopology build_topology(TopologyKind kind, int n, int rows = 0,
                                       int cols = 0) {
  switch (kind) {
    case TopologyKind::Independent: return NeighborTopology::independent(n);
    case TopologyKind::FullSet: return NeighborTopology::full_set(n);
    case TopologyKind::Chain1D: return NeighborTopology::chain_1d(n);
    case TopologyKind::Grid2D: {
      if (rows < 1 || cols < 1 || rows * cols != n) {
        throw std::invalid_argument("build_topology: grid " + std::to_string(rows) +
                                    "x" + std::to_string(cols) +
                                    " does not match n=" + std::to_string(n));
      }
      return NeighborTopology::grid_2d(rows, cols);
    }
    case TopologyKind::Custom:
      throw std::invalid_argument(
          "build_topology: custom topology requires an explicit adjacency");
  }
  throw std::invalid_argument("build_topology: unknown kind");
}

}  // namespace ampnnspl

#endif  // AMPNNSPL_TOPOLOGY_HPP
