#include "pwos/surface_scene.hpp"

namespace pwos {

struct ScenePrimAdapter {
  const std::vector<Vec3>& verts;
  const std::vector<ScenePrimitive>& prims;

  Aabb bounds(int i) const {
    const ScenePrimitive& p = prims[i];
    Aabb b;
    b.expand(verts[p.v[0]]);
    if (p.dim >= 1) b.expand(verts[p.v[1]]);
    if (p.dim >= 2) b.expand(verts[p.v[2]]);
    return b;
  }

  void closest(int i, const Vec3& q, double& best2, int& bestPrim, Vec3& bestPoint) const {
    const ScenePrimitive& p = prims[i];
    Vec3 c;
    if (p.dim == 2) {
      Vec3 bary;
      c = closestPointTriangle(verts[p.v[0]], verts[p.v[1]], verts[p.v[2]], q, bary);
    } else if (p.dim == 1) {
      closestPointSegment(verts[p.v[0]], verts[p.v[1]], q, c);
    } else {
      c = verts[p.v[0]];
    }
    double d2 = norm2(q - c);
    // Exact ties resolve to the lowest primitive id for determinism.
    if (d2 < best2 || (d2 == best2 && (bestPrim < 0 || i < bestPrim))) {
      best2 = d2;
      bestPrim = i;
      bestPoint = c;
    }
  }

  void raycast(int i, const Vec3& o, const Vec3& d, double& tBest, int& bestPrim) const {
    const ScenePrimitive& p = prims[i];
    if (p.dim != 2) return;  // curves and points are invisible to rays
    const Vec3 &a = verts[p.v[0]], &b = verts[p.v[1]], &c = verts[p.v[2]];
    // Moller-Trumbore
    Vec3 e1 = b - a, e2 = c - a;
    Vec3 pv = cross(d, e2);
    double det = dot(e1, pv);
    if (std::abs(det) < 1e-14) return;
    double inv = 1.0 / det;
    Vec3 tv = o - a;
    double u = dot(tv, pv) * inv;
    if (u < -1e-12 || u > 1 + 1e-12) return;
    Vec3 qv = cross(tv, e1);
    double v = dot(d, qv) * inv;
    if (v < -1e-12 || u + v > 1 + 1e-12) return;
    double t = dot(e2, qv) * inv;
    if (t > 1e-12 && t < tBest) {
      tBest = t;
      bestPrim = i;
    }
  }
};

SurfaceScene::SurfaceScene(std::vector<Vec3> vertices, std::vector<ScenePrimitive> primitives,
                           std::vector<Vec3> vertexNormals)
    : vertices_(std::move(vertices)),
      primitives_(std::move(primitives)),
      normals_(std::move(vertexNormals)) {
  for (const Vec3& v : vertices_) bounds_.expand(v);
  ScenePrimAdapter adapter{vertices_, primitives_};
  bvh_.build(adapter, static_cast<int>(primitives_.size()));
}

double SurfaceScene::primMeasure(int prim) const {
  const ScenePrimitive& p = primitives_[prim];
  if (p.dim == 2)
    return 0.5 * norm(cross(vertices_[p.v[1]] - vertices_[p.v[0]],
                            vertices_[p.v[2]] - vertices_[p.v[0]]));
  if (p.dim == 1) return norm(vertices_[p.v[1]] - vertices_[p.v[0]]);
  return 0.0;
}

ClosestPointHit SurfaceScene::closestPoint(const Vec3& q, double maxDist) const {
  ScenePrimAdapter adapter{vertices_, primitives_};
  int bestPrim = -1;
  Vec3 bestPoint;
  double bound2 = maxDist < kInf ? maxDist * maxDist * (1 + 1e-12) + 1e-300 : kInf;
  double d2 = bvh_.closestPoint(adapter, q, bestPrim, bestPoint, bound2);
  ClosestPointHit hit;
  if (bestPrim < 0) return hit;
  hit.prim = bestPrim;
  hit.dist = std::sqrt(d2);
  const ScenePrimitive& p = primitives_[bestPrim];
  if (p.dim == 2) {
    Vec3 bary;
    hit.point = closestPointTriangle(vertices_[p.v[0]], vertices_[p.v[1]], vertices_[p.v[2]], q, bary);
    hit.bary = bary;
  } else if (p.dim == 1) {
    Vec3 c;
    double t = closestPointSegment(vertices_[p.v[0]], vertices_[p.v[1]], q, c);
    hit.point = c;
    hit.bary = {1 - t, t, 0};
  } else {
    hit.point = vertices_[p.v[0]];
    hit.bary = {1, 0, 0};
  }
  return hit;
}

RayHit SurfaceScene::intersectRay(const Vec3& o, const Vec3& d, double tMax) const {
  ScenePrimAdapter adapter{vertices_, primitives_};
  int bestPrim = -1;
  double t = bvh_.raycast(adapter, o, d, bestPrim, tMax);
  RayHit hit;
  if (bestPrim < 0) return hit;
  hit.prim = bestPrim;
  hit.t = t;
  hit.point = o + d * t;
  const ScenePrimitive& p = primitives_[bestPrim];
  Vec3 bary;
  closestPointTriangle(vertices_[p.v[0]], vertices_[p.v[1]], vertices_[p.v[2]], hit.point, bary);
  hit.bary = bary;
  return hit;
}

Frame SurfaceScene::frameAt(const ClosestPointHit& hit) const {
  const ScenePrimitive& p = primitives_[hit.prim];
  Frame f;
  if (p.dim == 2) {
    Vec3 e1 = vertices_[p.v[1]] - vertices_[p.v[0]];
    Vec3 e2 = vertices_[p.v[2]] - vertices_[p.v[0]];
    f.normal = normalize(cross(e1, e2));
    f.tangent = normalize(e1);
  } else if (p.dim == 1) {
    f.tangent = normalize(vertices_[p.v[1]] - vertices_[p.v[0]]);
  } else if (!normals_.empty()) {
    f.normal = normalize(normals_[p.v[0]]);
  }
  return f;
}

}  // namespace pwos
