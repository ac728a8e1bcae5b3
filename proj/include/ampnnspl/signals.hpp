#ifndef AMPNNSPL_SIGNALS_HPP
#define AMPNNSPL_SIGNALS_HPP

#include "ampnnspl/common.hpp"
#include "ampnnspl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace ampnnspl {

/// Block-sparse signal family: K nonzeros in L blocks of random sizes and
/// locations, nonzero values i.i.d. N(mu0, tau0).
struct BlockSparseSpec {
  int n = 100;
  int k = 25;
  int l = 4;
  double mu0 = 3.0;
  double tau0 = 1.0;

  void validate() const {
    if (!(1 <= l && l <= k && k <= n)) {
      throw std::invalid_argument("BlockSparseSpec: need 1 <= L <= K <= N");
    }
    if (!(tau0 > 0.0)) {
      throw std::invalid_argument("BlockSparseSpec: tau0 must be positive");
    }
  }
};

namespace detail {

// Floyd's algorithm: uniform subset of `count` distinct values from
// {1, ..., upper}, returned sorted.
inline std::vector<std::int64_t> sample_distinct(std::int64_t upper,
                                                 std::int64_t count, Rng& rng) {
  std::unordered_set<std::int64_t> chosen;
  std::vector<std::int64_t> out;
  out.reserve(count);
  for (std::int64_t j = upper - count + 1; j <= upper; ++j) {
    const std::int64_t t = 1 + static_cast<std::int64_t>(rng.bounded(j));
    if (chosen.insert(t).second) {
      out.push_back(t);
    } else {
      chosen.insert(j);
      out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Uniformly random composition of k into l positive parts (stars and bars:
// l-1 distinct cut points in {1, ..., k-1}).
inline std::vector<int> random_composition(int k, int l, Rng& rng) {
  std::vector<int> sizes;
  sizes.reserve(l);
  if (l == 1) {
    sizes.push_back(k);
    return sizes;
  }
  const auto cuts = sample_distinct(k - 1, l - 1, rng);
  std::int64_t prev = 0;
  for (const std::int64_t c : cuts) {
    sizes.push_back(static_cast<int>(c - prev));
    prev = c;
  }
  sizes.push_back(static_cast<int>(k - prev));
  return sizes;
}

// Exact uniform placement of blocks with the given sizes, left to right,
// separated by at least one zero: distributes the free zeros over the l+1
// gaps by stars and bars. Used as the termination guarantee when plain
// rejection runs long on tight instances.
inline std::vector<int> place_blocks_by_gaps(int n, const std::vector<int>& sizes,
                                             Rng& rng) {
  const int l = static_cast<int>(sizes.size());
  int k = 0;
  for (int s : sizes) k += s;
  const std::int64_t free_zeros = n - k - (l - 1);
  std::vector<std::int64_t> gaps(l + 1, 0);
  if (free_zeros > 0) {
    const auto cuts = sample_distinct(free_zeros + l, l, rng);
    std::int64_t prev = 0;
    for (int j = 0; j < l; ++j) {
      gaps[j] = cuts[j] - prev - 1;
      prev = cuts[j];
    }
    gaps[l] = free_zeros + l - prev;
  }
  std::vector<int> starts(l);
  int pos = static_cast<int>(gaps[0]);
  for (int j = 0; j < l; ++j) {
    starts[j] = pos;
    pos += sizes[j] + 1 + static_cast<int>(gaps[j + 1]);
  }
  return starts;
}

}  // namespace detail

/// Draws one block-sparse signal: block sizes are a uniformly random
/// composition of K into L positive parts; block positions are rejection
/// sampled until non-overlapping and non-adjacent (adjacent blocks would
/// merge and leave fewer than L blocks). Throws if K + L - 1 > N, where no
/// placement exists.
inline Vector generate_block_sparse(const BlockSparseSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.k + spec.l - 1 > spec.n) {
    throw std::invalid_argument("generate_block_sparse: K + L - 1 > N, blocks cannot fit");
  }

  const std::vector<int> sizes = detail::random_composition(spec.k, spec.l, rng);

  std::vector<std::pair<int, int>> placed(spec.l);  // (start, size)
  bool ok = false;
  for (int attempt = 0; attempt < 10000 && !ok; ++attempt) {
    for (int j = 0; j < spec.l; ++j) {
      placed[j] = {static_cast<int>(rng.bounded(spec.n - sizes[j] + 1)), sizes[j]};
    }
    std::sort(placed.begin(), placed.end());
    ok = true;
    for (int j = 0; j + 1 < spec.l; ++j) {
      if (placed[j + 1].first <= placed[j].first + placed[j].second) {
        ok = false;
        break;
      }
    }
  }
  if (!ok) {
    const auto starts = detail::place_blocks_by_gaps(spec.n, sizes, rng);
    for (int j = 0; j < spec.l; ++j) placed[j] = {starts[j], sizes[j]};
  }

  Vector x = Vector::Zero(spec.n);
  const double sd = std::sqrt(spec.tau0);
  for (const auto& [start, size] : placed) {
    for (int i = start; i < start + size; ++i) {
      x[i] = rng.normal(spec.mu0, sd);
    }
  }
  return x;
}

/// Synthetic clustered 2D support: seeds a few cluster centers, then grows
/// random connected blobs (uniform over the current frontier) until the
/// nonzero count reaches round(target_sparsity * rows * cols), or the grid
/// saturates. Every seed immediately claims one neighbor, so no nonzero
/// pixel is 4-isolated. Nonzero values are i.i.d. N(mu0, tau0) assigned in
/// row-major order.
inline Vector generate_cluster_image(int rows, int cols, double target_sparsity,
                                     Rng& rng, double mu0 = 3.0, double tau0 = 1.0) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("generate_cluster_image: bad dimensions");
  }
  if (!(target_sparsity > 0.0 && target_sparsity < 1.0)) {
    throw std::invalid_argument("generate_cluster_image: target_sparsity must be in (0,1)");
  }
  const int n = rows * cols;
  const int target = std::clamp<int>(
      static_cast<int>(std::llround(target_sparsity * n)), 0, n);

  Vector x = Vector::Zero(n);
  if (target == 0) return x;

  std::vector<char> active(n, 0);
  std::vector<char> in_frontier(n, 0);
  std::vector<int> frontier;
  int count = 0;

  const auto for_each_neighbor = [&](int p, auto&& f) {
    const int q = p / cols;
    const int l = p % cols;
    if (q > 0) f(p - cols);
    if (q + 1 < rows) f(p + cols);
    if (l > 0) f(p - 1);
    if (l + 1 < cols) f(p + 1);
  };
  const auto activate = [&](int p) {
    active[p] = 1;
    ++count;
    for_each_neighbor(p, [&](int q) {
      if (!active[q] && !in_frontier[q]) {
        in_frontier[q] = 1;
        frontier.push_back(q);
      }
    });
  };

  int num_seeds = std::max(1, static_cast<int>(std::llround(target / 64.0)));
  num_seeds = std::min(num_seeds, std::max(1, target / 2));
  for (int s = 0; s < num_seeds && count < target; ++s) {
    int p;
    do {
      p = static_cast<int>(rng.bounded(n));
    } while (active[p]);
    activate(p);
    if (count < target) {
      std::vector<int> zero_nbrs;
      for_each_neighbor(p, [&](int q) {
        if (!active[q]) zero_nbrs.push_back(q);
      });
      if (!zero_nbrs.empty()) {
        activate(zero_nbrs[rng.bounded(zero_nbrs.size())]);
      }
    }
  }

  while (count < target) {
    int p = -1;
    while (!frontier.empty()) {
      const std::size_t idx = rng.bounded(frontier.size());
      const int candidate = frontier[idx];
      frontier[idx] = frontier.back();
      frontier.pop_back();
      if (!active[candidate]) {
        p = candidate;
        break;
      }
    }
    if (p < 0) break;  // saturated: all remaining pixels already nonzero
    activate(p);
  }

  const double sd = std::sqrt(tau0);
  for (int p = 0; p < n; ++p) {
    if (active[p]) x[p] = rng.normal(mu0, sd);
  }
  return x;
}

}  // namespace ampnnspl

#endif  // AMPNNSPL_SIGNALS_HPP
