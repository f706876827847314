#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "pwos/core.hpp"

namespace pwos {

// Bounding volume hierarchy over a fixed primitive set. The Prims adapter
// supplies bounds and the per-primitive query kernels:
//
//   Aabb bounds(int prim) const;
//   void closest(int prim, const Vec3& q, double& best2, int& bestPrim, Vec3& bestPoint) const;
//   void raycast(int prim, const Vec3& o, const Vec3& d, double& tBest, int& bestPrim) const;
//
// Traversal is nearest-child-first with distance pruning, which keeps closest
// point queries cheap when a good initial upper bound is available.
template <class Prims>
class Bvh {
 public:
  Bvh() = default;

  void build(const Prims& prims, int primCount) {
    primIds_.resize(primCount);
    std::iota(primIds_.begin(), primIds_.end(), 0);
    nodes_.clear();
    nodes_.reserve(primCount > 0 ? 2 * primCount : 1);
    std::vector<Aabb> primBounds(primCount);
    std::vector<Vec3> primCenters(primCount);
    for (int i = 0; i < primCount; ++i) {
      primBounds[i] = prims.bounds(i);
      primCenters[i] = primBounds[i].center();
    }
    if (primCount == 0) {
      nodes_.push_back(Node{});
      return;
    }
    buildNode(0, primCount, primBounds, primCenters);
  }

  // Returns squared distance to the closest primitive point; bestPrim < 0 when
  // nothing beats the initial bound. maxDist2 prunes the search.
  double closestPoint(const Prims& prims, const Vec3& q, int& bestPrim, Vec3& bestPoint,
                      double maxDist2 = kInf) const {
    double best2 = maxDist2;
    bestPrim = -1;
    if (nodes_.empty() || primIds_.empty()) return best2;
    struct Entry { int node; double d2; };
    Entry stack[64];
    int top = 0;
    stack[top++] = {0, nodes_[0].bounds.distance2(q)};
    while (top > 0) {
      Entry e = stack[--top];
      // Equal distances are kept alive so exact ties resolve to the lowest
      // primitive id no matter which leaf is reached first.
      if (e.d2 > best2) continue;
      const Node& node = nodes_[e.node];
      if (node.count > 0) {
        for (int i = 0; i < node.count; ++i)
          prims.closest(primIds_[node.start + i], q, best2, bestPrim, bestPoint);
      } else {
        int left = e.node + 1;
        int right = node.start;
        double dl = nodes_[left].bounds.distance2(q);
        double dr = nodes_[right].bounds.distance2(q);
        // Push the farther child first so the nearer one is processed next.
        if (dl <= dr) {
          if (dr <= best2) stack[top++] = {right, dr};
          if (dl <= best2) stack[top++] = {left, dl};
        } else {
          if (dl <= best2) stack[top++] = {left, dl};
          if (dr <= best2) stack[top++] = {right, dr};
        }
      }
    }
    return best2;
  }

  // First-hit ray query; returns parameter t along d, or kInf on miss.
  double raycast(const Prims& prims, const Vec3& o, const Vec3& d, int& bestPrim,
                 double tMax = kInf) const {
    double tBest = tMax;
    bestPrim = -1;
    if (nodes_.empty() || primIds_.empty()) return tBest;
    Vec3 invD{1.0 / d.x, 1.0 / d.y, 1.0 / d.z};
    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      int ni = stack[--top];
      const Node& node = nodes_[ni];
      if (!rayBoxHit(node.bounds, o, invD, tBest)) continue;
      if (node.count > 0) {
        for (int i = 0; i < node.count; ++i)
          prims.raycast(primIds_[node.start + i], o, d, tBest, bestPrim);
      } else {
        stack[top++] = node.start;
        stack[top++] = ni + 1;
      }
    }
    return tBest;
  }

  const Aabb& rootBounds() const { return nodes_[0].bounds; }

 private:
  struct Node {
    Aabb bounds;
    int start = 0;  // leaf: first index into primIds_; inner: right child node
    int count = 0;  // leaf: number of primitives; inner: 0
  };

  static bool rayBoxHit(const Aabb& b, const Vec3& o, const Vec3& invD, double tMax) {
    double t0 = 0, t1 = tMax;
    for (int i = 0; i < 3; ++i) {
      double ta = (b.lo[i] - o[i]) * invD[i];
      double tb = (b.hi[i] - o[i]) * invD[i];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
    return true;
  }

  int buildNode(int begin, int end, const std::vector<Aabb>& primBounds,
                const std::vector<Vec3>& primCenters) {
    int nodeId = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{});
    Aabb bounds;
    for (int i = begin; i < end; ++i) bounds.expand(primBounds[primIds_[i]]);
    nodes_[nodeId].bounds = bounds;
    int count = end - begin;
    if (count <= kLeafSize) {
      nodes_[nodeId].start = begin;
      nodes_[nodeId].count = count;
      return nodeId;
    }
    Vec3 ext = bounds.extent();
    int axis = 0;
    if (ext.y > ext.x) axis = 1;
    if (ext.z > ext[axis]) axis = 2;
    int mid = begin + count / 2;
    std::nth_element(primIds_.begin() + begin, primIds_.begin() + mid, primIds_.begin() + end,
                     [&](int a, int b) { return primCenters[a][axis] < primCenters[b][axis]; });
    buildNode(begin, mid, primBounds, primCenters);
    int right = buildNode(mid, end, primBounds, primCenters);
    nodes_[nodeId].start = right;
    return nodeId;
  }

  static constexpr int kLeafSize = 4;

  std::vector<Node> nodes_;
  std::vector<int> primIds_;
};

// Closest point on a segment [a, b]; returns the parameter in [0, 1].
inline double closestPointSegment(const Vec3& a, const Vec3& b, const Vec3& q, Vec3& out) {
  Vec3 ab = b - a;
  double len2 = norm2(ab);
  double t = len2 > 0 ? clamp(dot(q - a, ab) / len2, 0.0, 1.0) : 0.0;
  out = a + ab * t;
  return t;
}

// Closest point on a triangle (Ericson, Real-Time Collision Detection §5.1.5).
// Also reports barycentric coordinates (u, v, w) for (a, b, c).
inline Vec3 closestPointTriangle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& q,
                                 Vec3& bary) {
  Vec3 ab = b - a, ac = c - a, aq = q - a;
  double d1 = dot(ab, aq), d2 = dot(ac, aq);
  if (d1 <= 0 && d2 <= 0) { bary = {1, 0, 0}; return a; }

  Vec3 bq = q - b;
  double d3 = dot(ab, bq), d4 = dot(ac, bq);
  if (d3 >= 0 && d4 <= d3) { bary = {0, 1, 0}; return b; }

  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    double v = d1 / (d1 - d3);
    bary = {1 - v, v, 0};
    return a + ab * v;
  }

  Vec3 cq = q - c;
  double d5 = dot(ab, cq), d6 = dot(ac, cq);
  if (d6 >= 0 && d5 <= d6) { bary = {0, 0, 1}; return c; }

  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    double w = d2 / (d2 - d6);
    bary = {1 - w, 0, w};
    return a + ac * w;
  }

  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    bary = {0, 1 - w, w};
    return b + (c - b) * w;
  }

  double denom = 1.0 / (va + vb + vc);
  double v = vb * denom, w = vc * denom;
  bary = {1 - v - w, v, w};
  return a + ab * v + ac * w;
}

}  // namespace pwos
