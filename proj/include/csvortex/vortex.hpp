#pragma once

// Vortex configurations and their epsilon-cluster structure.

#include <numeric>
#include <stdexcept>
#include <vector>

#include "csvortex/core.hpp"

namespace csvortex {

struct VortexConfiguration {
  std::vector<Vec2> points;          // reduced into [0,1)^2
  std::vector<int> multiplicities;   // alpha_i >= 1
  double epsilon = 0.0;

  VortexConfiguration() = default;
  VortexConfiguration(std::vector<Vec2> pts, std::vector<int> mult, double eps)
      : points(std::move(pts)), multiplicities(std::move(mult)), epsilon(eps) {
    if (epsilon <= 0.0)
      throw std::invalid_argument("VortexConfiguration: epsilon must be > 0");
    if (multiplicities.empty())
      multiplicities.assign(points.size(), 1);
    if (multiplicities.size() != points.size())
      throw std::invalid_argument("VortexConfiguration: size mismatch");
    for (int m : multiplicities)
      if (m < 1)
        throw std::invalid_argument("VortexConfiguration: multiplicity < 1");
    for (auto& p : points) p = wrap_unit(p);
  }

  static VortexConfiguration single(Vec2 p, int mult, double eps) {
    return VortexConfiguration({p}, {mult}, eps);
  }
  static VortexConfiguration empty(double eps) {
    return VortexConfiguration({}, {}, eps);
  }

  int count() const { return static_cast<int>(points.size()); }
  /// N = total vortex number (with multiplicity).
  int total_multiplicity() const {
    return std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
  }
};

struct ClusterPartition {
  struct PairRatio {
    int i = 0, j = 0;
    double ratio = 0.0;  // |p_i - p_j| / epsilon
  };
  std::vector<std::vector<int>> clusters;  // disjoint index sets covering all
  std::vector<PairRatio> velocities;       // per pair inside a cluster
};

/// Transitive closure of the relation |p_i - p_j| / eps <= threshold
/// (torus distance). Clusters are reported with indices ascending and in
/// order of their smallest member.
inline ClusterPartition classify_clusters(const VortexConfiguration& cfg,
                                          double threshold) {
  const int n = cfg.count();
  ClusterPartition out;
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    // breadth-first sweep over the neighbor relation
    std::vector<int> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < n; ++b) {
        if (comp[b] >= 0) continue;
        double ratio = torus_dist(cfg.points[a], cfg.points[b]) / cfg.epsilon;
        if (ratio <= threshold) {
          comp[b] = ncomp;
          stack.push_back(b);
        }
      }
    }
    ++ncomp;
  }
  out.clusters.assign(ncomp, {});
  for (int i = 0; i < n; ++i) out.clusters[comp[i]].push_back(i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (comp[i] == comp[j])
        out.velocities.push_back(
            {i, j, torus_dist(cfg.points[i], cfg.points[j]) / cfg.epsilon});
  return out;
}

}  // namespace csvortex
