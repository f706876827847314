#pragma once

#include <string>
#include <vector>

#include "pwos/core.hpp"
#include "pwos/surface_scene.hpp"

namespace pwos {

// Values carried by one boundary element, linearly interpolated between its
// endpoints. `left`/`right` differ only for two-sided elements; which side is
// which follows from the element tangent (segments) or the scene tangent at
// the element (points), see side().
struct BoundaryElementValues {
  Vec3 left[2] = {{0, 0, 0}, {0, 0, 0}};
  Vec3 right[2] = {{0, 0, 0}, {0, 0, 0}};
};

// Dirichlet boundary: points pinned on curve patches and polyline curves
// pinned on triangle patches, each with prescribed (possibly two-sided)
// values. Geometry queries reuse SurfaceScene over the lower-dimensional
// elements. Immutable after construction.
class DirichletBoundary {
 public:
  DirichletBoundary() = default;
  DirichletBoundary(std::vector<Vec3> vertices, std::vector<ScenePrimitive> elements,
                    std::vector<BoundaryElementValues> values);

  // Isolated boundary points with per-point values (left = forward along the
  // scene curve's tangent).
  static DirichletBoundary points(const std::vector<Vec3>& positions,
                                  const std::vector<Vec3>& left, const std::vector<Vec3>& right);
  static DirichletBoundary points(const std::vector<Vec3>& positions,
                                  const std::vector<Vec3>& values);

  // Polyline boundary with per-vertex values shared by incident segments.
  static DirichletBoundary polyline(const std::vector<Vec3>& vertices,
                                    const std::vector<std::pair<int, int>>& segments,
                                    const std::vector<Vec3>& left, const std::vector<Vec3>& right);
  static DirichletBoundary polyline(const std::vector<Vec3>& vertices,
                                    const std::vector<std::pair<int, int>>& segments,
                                    const std::vector<Vec3>& values);

  // OBJ (l/p records) geometry plus a CSV value table. Each CSV row is
  // "element_index,v" (one-sided scalar), "element_index,v_left,v_right"
  // (two-sided scalar), or the 3/6 column RGB equivalents.
  static DirichletBoundary fromFiles(const std::string& objPath, const std::string& csvPath);

  bool empty() const { return geo_.primitives().empty(); }
  const SurfaceScene& geometry() const { return geo_; }
  int elementDim(int element) const { return geo_.patchDim(element); }
  bool twoSided() const { return twoSided_; }

  ClosestPointHit closest(const Vec3& x, double maxDist = kInf) const {
    return geo_.closestPoint(x, maxDist);
  }
  Frame tangentAt(const ClosestPointHit& hit) const { return geo_.frameAt(hit); }

  // Signed side of x relative to the boundary element: segments use
  // sign(((x - b) x t) . n) with the surface normal near b, points use
  // sign((x - b) . t_scene) with the scene curve tangent. Positive = left.
  double side(const ClosestPointHit& hit, const Vec3& x, const SurfaceScene& scene) const;

  // Boundary value at the hit, side-selected at x (average on the exact
  // boundary). One-sided elements skip the side test.
  Vec3 value(const ClosestPointHit& hit, const Vec3& x, const SurfaceScene& scene) const;

  Vec3 valueOnSide(const ClosestPointHit& hit, double side) const;

 private:
  SurfaceScene geo_;
  std::vector<BoundaryElementValues> values_;
  bool twoSided_ = false;
};

}  // namespace pwos
