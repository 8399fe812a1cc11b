#include "nugap/cluster.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace nugap::cluster {

std::vector<std::size_t> Dendrogram::members(std::size_t node) const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (is_leaf(v)) {
      out.push_back(v);
    } else {
      const auto [a, b] = children(v);
      stack.push_back(a);
      stack.push_back(b);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<std::size_t, std::size_t> Dendrogram::children(std::size_t node) const {
  if (is_leaf(node) || node - n_leaves >= merges.size()) throw std::out_of_range("not an internal node");
  const Merge& m = merges[node - n_leaves];
  return {m.a, m.b};
}

double Dendrogram::height(std::size_t node) const {
  if (is_leaf(node)) return 0.0;
  return merges.at(node - n_leaves).height;
}

std::vector<std::size_t> ClusterAssignment::members(std::size_t c) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == c) out.push_back(i);
  }
  return out;
}

Dendrogram complete_linkage(const metric::DistanceMatrix& D) {
  const std::size_t n = D.size();
  if (n < 2) throw std::invalid_argument("complete_linkage needs at least two systems");
  Dendrogram dend;
  dend.n_leaves = n;

  // Active clusters by id; linkage kept in a map keyed on id pairs and
  // updated with the max rule when two clusters merge.
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);
  std::map<std::pair<std::size_t, std::size_t>, double> link;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) link[{i, j}] = D(i, j);
  }
  auto key = [](std::size_t a, std::size_t b) { return a < b ? std::pair{a, b} : std::pair{b, a}; };

  std::size_t next_id = n;
  while (active.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_pair{0, 0};
    // active stays sorted, so the first strict minimum is the smallest pair
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const double h = link.at({active[x], active[y]});
        if (h < best) {
          best = h;
          best_pair = {active[x], active[y]};
        }
      }
    }
    const auto [a, b] = best_pair;
    const std::size_t id = next_id++;
    dend.merges.push_back({a, b, best, id});
    std::erase(active, a);
    std::erase(active, b);
    for (std::size_t c : active) {
      link[key(c, id)] = std::max(link.at(key(c, a)), link.at(key(c, b)));
    }
    active.push_back(id);
  }
  return dend;
}

ClusterAssignment cut(const Dendrogram& dend, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("cut threshold must be non-negative");
  const std::size_t n = dend.n_leaves;
  // Merge heights are non-decreasing, so the kept merges form a prefix.
  std::vector<std::size_t> root_of(n + dend.merges.size());
  std::iota(root_of.begin(), root_of.end(), 0);
  std::vector<bool> is_root(n + dend.merges.size(), false);
  for (std::size_t i = 0; i < n; ++i) is_root[i] = true;
  for (const Merge& m : dend.merges) {
    if (m.height > threshold) break;
    is_root[m.a] = false;
    is_root[m.b] = false;
    is_root[m.id] = true;
  }

  std::vector<std::pair<std::size_t, std::size_t>> roots;  // (smallest member, node)
  for (std::size_t v = 0; v < is_root.size(); ++v) {
    if (is_root[v]) roots.emplace_back(dend.members(v).front(), v);
  }
  std::sort(roots.begin(), roots.end());

  ClusterAssignment out;
  out.labels.assign(n, 0);
  out.k = roots.size();
  out.cut_height = threshold;
  for (std::size_t c = 0; c < roots.size(); ++c) {
    out.nodes.push_back(roots[c].second);
    for (std::size_t leaf : dend.members(roots[c].second)) out.labels[leaf] = c;
  }
  return out;
}

std::size_t medoid(const std::vector<std::size_t>& members, const metric::DistanceMatrix& D) {
  if (members.empty()) throw std::invalid_argument("medoid of an empty set");
  std::size_t best = members.front();
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i : sorted) {
    double worst = 0.0;
    for (std::size_t j : sorted) worst = std::max(worst, D(i, j));
    if (worst < best_val) {
      best_val = worst;
      best = i;
    }
  }
  return best;
}

}  // namespace nugap::cluster
