#pragma once

#include <string>
#include <vector>

#include "pwos/bvh.hpp"
#include "pwos/core.hpp"

namespace pwos {

// A surface scene holds the geometric support S of the PDE: any mix of
// triangles (2d patches), polyline segments (1d patches), and isolated points.
struct ScenePrimitive {
  int v[3] = {-1, -1, -1};
  int dim = 2;  // 2 triangle, 1 segment, 0 point
};

struct ClosestPointHit {
  Vec3 point;          // closest point on the scene
  int prim = -1;       // primitive index
  Vec3 bary{1, 0, 0};  // interpolation weights for the primitive's vertices
  double dist = kInf;
};

struct RayHit {
  Vec3 point;
  int prim = -1;
  Vec3 bary{1, 0, 0};
  double t = kInf;
};

// Local frame of the surface patch at a point: `normal` is defined for
// triangle patches, `tangent` for both triangles and curve segments.
struct Frame {
  Vec3 normal{0, 0, 0};
  Vec3 tangent{0, 0, 0};
};

class SurfaceScene {
 public:
  SurfaceScene() = default;
  SurfaceScene(std::vector<Vec3> vertices, std::vector<ScenePrimitive> primitives,
               std::vector<Vec3> vertexNormals = {});

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<ScenePrimitive>& primitives() const { return primitives_; }
  const std::vector<Vec3>& vertexNormals() const { return normals_; }
  const Aabb& bounds() const { return bounds_; }

  int patchDim(int prim) const { return primitives_[prim].dim; }
  double primMeasure(int prim) const;  // area / length / 0

  // Closest point projection onto the scene. `maxDist` (when finite) is an
  // upper bound on the answer used to prune traversal; the true closest point
  // is still returned as long as the bound holds.
  ClosestPointHit closestPoint(const Vec3& q, double maxDist = kInf) const;

  // First triangle hit along the ray o + t*d (curve/point primitives are
  // never reported; they have measure zero for rendering purposes).
  RayHit intersectRay(const Vec3& o, const Vec3& d, double tMax = kInf) const;

  Frame frameAt(const ClosestPointHit& hit) const;

  template <class T>
  T interpolate(const ClosestPointHit& hit, const std::vector<T>& vertexValues) const {
    const ScenePrimitive& p = primitives_[hit.prim];
    T out = vertexValues[p.v[0]] * hit.bary[0];
    if (p.dim >= 1) out += vertexValues[p.v[1]] * hit.bary[1];
    if (p.dim >= 2) out += vertexValues[p.v[2]] * hit.bary[2];
    return out;
  }

 private:
  friend struct ScenePrimAdapter;

  std::vector<Vec3> vertices_;
  std::vector<ScenePrimitive> primitives_;
  std::vector<Vec3> normals_;  // per-vertex; may be empty (used by point clouds)
  Aabb bounds_;
  Bvh<struct ScenePrimAdapter> bvh_;
};

}  // namespace pwos
