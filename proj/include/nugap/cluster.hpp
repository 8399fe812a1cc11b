#pragma once

#include <cstddef>
#include <vector>

#include "nugap/metric.hpp"

namespace nugap::cluster {

/// One agglomeration step. Leaves are ids 0..n-1; the k-th merge creates
/// id n + k.
struct Merge {
  std::size_t a = 0;
  std::size_t b = 0;
  double height = 0.0;
  std::size_t id = 0;
};

struct Dendrogram {
  std::size_t n_leaves = 0;
  std::vector<Merge> merges;

  /// Leaf indices under a node, ascending.
  std::vector<std::size_t> members(std::size_t node) const;
  /// Children (a, b) of an internal node.
  std::pair<std::size_t, std::size_t> children(std::size_t node) const;
  bool is_leaf(std::size_t node) const { return node < n_leaves; }
  /// Height of an internal node, 0 for leaves.
  double height(std::size_t node) const;
};

struct ClusterAssignment {
  std::vector<std::size_t> labels;
  std::size_t k = 0;
  double cut_height = 0.0;
  /// Dendrogram node whose leaves form cluster c.
  std::vector<std::size_t> nodes;

  std::vector<std::size_t> members(std::size_t c) const;
};

/// Complete linkage: the distance between two clusters is the largest
/// pairwise member distance. Among equal-distance candidates the pair of
/// active cluster ids (a, b), a < b, that is lexicographically smallest
/// merges first.
Dendrogram complete_linkage(const metric::DistanceMatrix& D);

/// Drops every merge with height > threshold; merges at exactly the
/// threshold are kept. Clusters are numbered by their smallest member.
ClusterAssignment cut(const Dendrogram& dend, double threshold);

/// Member with the smallest maximal distance to the others; ties go to the
/// smallest index.
std::size_t medoid(const std::vector<std::size_t>& members, const metric::DistanceMatrix& D);

}  // namespace nugap::cluster
