#pragma once

#include <utility>
#include <vector>

#include "pwos/bvh.hpp"
#include "pwos/core.hpp"

namespace pwos {

// Nearest-neighbor index over a fixed point set.
class PointSetIndex {
 public:
  PointSetIndex() = default;

  explicit PointSetIndex(std::vector<Vec3> points) : points_(std::move(points)) {
    Adapter adapter{points_, -1};
    bvh_.build(adapter, static_cast<int>(points_.size()));
  }

  struct Nearest {
    int index = -1;
    double dist = kInf;
  };

  // excludeIndex (when >= 0) skips one point, e.g. for self-queries.
  Nearest nearest(const Vec3& q, double maxDist = kInf, int excludeIndex = -1) const {
    Adapter adapter{points_, excludeIndex};
    int best = -1;
    Vec3 bestPoint;
    double bound2 = maxDist < kInf ? maxDist * maxDist : kInf;
    double d2 = bvh_.closestPoint(adapter, q, best, bestPoint, bound2);
    Nearest out;
    if (best >= 0) {
      out.index = best;
      out.dist = std::sqrt(d2);
    }
    return out;
  }

  const std::vector<Vec3>& points() const { return points_; }
  bool empty() const { return points_.empty(); }

 private:
  struct Adapter {
    const std::vector<Vec3>& pts;
    int exclude;
    Aabb bounds(int i) const {
      Aabb b;
      b.expand(pts[i]);
      return b;
    }
    void closest(int i, const Vec3& q, double& best2, int& bestPrim, Vec3& bestPoint) const {
      if (i == exclude) return;
      double d2 = norm2(q - pts[i]);
      if (d2 < best2 || (d2 == best2 && (bestPrim < 0 || i < bestPrim))) {
        best2 = d2;
        bestPrim = i;
        bestPoint = pts[i];
      }
    }
    void raycast(int, const Vec3&, const Vec3&, double&, int&) const {}
  };

  std::vector<Vec3> points_;
  Bvh<Adapter> bvh_;
};

}  // namespace pwos
