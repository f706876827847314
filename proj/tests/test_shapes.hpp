#pragma once

// Analytic scene builders shared by the test suites.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "pwos/core.hpp"
#include "pwos/rng.hpp"
#include "pwos/surface_scene.hpp"

namespace pwos::shapes {

inline SurfaceScene uvSphere(int nLat, int nLon, double radius) {
  std::vector<Vec3> verts;
  std::vector<ScenePrimitive> prims;
  verts.push_back({0, 0, radius});
  for (int i = 1; i < nLat; ++i) {
    double theta = kPi * i / nLat;
    for (int j = 0; j < nLon; ++j) {
      double phi = 2 * kPi * j / nLon;
      verts.push_back({radius * std::sin(theta) * std::cos(phi),
                       radius * std::sin(theta) * std::sin(phi), radius * std::cos(theta)});
    }
  }
  verts.push_back({0, 0, -radius});
  int south = static_cast<int>(verts.size()) - 1;
  auto ring = [&](int i, int j) { return 1 + (i - 1) * nLon + (j % nLon); };
  auto tri = [&](int a, int b, int c) {
    ScenePrimitive p;
    p.dim = 2;
    p.v[0] = a;
    p.v[1] = b;
    p.v[2] = c;
    prims.push_back(p);
  };
  for (int j = 0; j < nLon; ++j) tri(0, ring(1, j), ring(1, j + 1));
  for (int i = 1; i < nLat - 1; ++i)
    for (int j = 0; j < nLon; ++j) {
      tri(ring(i, j), ring(i + 1, j), ring(i + 1, j + 1));
      tri(ring(i, j), ring(i + 1, j + 1), ring(i, j + 1));
    }
  for (int j = 0; j < nLon; ++j) tri(south, ring(nLat - 1, j + 1), ring(nLat - 1, j));
  return SurfaceScene(std::move(verts), std::move(prims));
}

// Vertex indices of the equatorial ring of uvSphere (requires even nLat).
inline std::vector<int> uvSphereEquatorRing(int nLat, int nLon) {
  std::vector<int> ring;
  for (int j = 0; j < nLon; ++j) ring.push_back(1 + (nLat / 2 - 1) * nLon + j);
  return ring;
}

inline SurfaceScene uvTorus(int nU, int nV, double R, double r) {
  std::vector<Vec3> verts;
  std::vector<ScenePrimitive> prims;
  for (int i = 0; i < nU; ++i) {
    double u = 2 * kPi * i / nU;
    for (int j = 0; j < nV; ++j) {
      double v = 2 * kPi * j / nV;
      verts.push_back({(R + r * std::cos(v)) * std::cos(u), (R + r * std::cos(v)) * std::sin(u),
                       r * std::sin(v)});
    }
  }
  auto at = [&](int i, int j) { return (i % nU) * nV + (j % nV); };
  for (int i = 0; i < nU; ++i)
    for (int j = 0; j < nV; ++j) {
      ScenePrimitive p;
      p.dim = 2;
      p.v[0] = at(i, j);
      p.v[1] = at(i + 1, j);
      p.v[2] = at(i + 1, j + 1);
      prims.push_back(p);
      p.v[0] = at(i, j);
      p.v[1] = at(i + 1, j + 1);
      p.v[2] = at(i, j + 1);
      prims.push_back(p);
    }
  return SurfaceScene(std::move(verts), std::move(prims));
}

// Unit circle in the z = 0 plane as a closed polyline with a vertex exactly at
// angle theta0; segments run toward increasing angle.
inline SurfaceScene circleCurve(int n, double theta0) {
  std::vector<Vec3> verts;
  std::vector<ScenePrimitive> prims;
  for (int k = 0; k < n; ++k) {
    double th = theta0 + 2 * kPi * k / n;
    verts.push_back({std::cos(th), std::sin(th), 0});
  }
  for (int k = 0; k < n; ++k) {
    ScenePrimitive p;
    p.dim = 1;
    p.v[0] = k;
    p.v[1] = (k + 1) % n;
    prims.push_back(p);
  }
  return SurfaceScene(std::move(verts), std::move(prims));
}

// Axis-aligned rectangle [x0,x1] x [y0,y1] at z = 0, two triangles, +z normals.
inline SurfaceScene flatSheet(double x0, double x1, double y0, double y1) {
  std::vector<Vec3> verts = {{x0, y0, 0}, {x1, y0, 0}, {x1, y1, 0}, {x0, y1, 0}};
  std::vector<ScenePrimitive> prims(2);
  prims[0].dim = 2;
  prims[0].v[0] = 0;
  prims[0].v[1] = 1;
  prims[0].v[2] = 2;
  prims[1].dim = 2;
  prims[1].v[0] = 0;
  prims[1].v[1] = 2;
  prims[1].v[2] = 3;
  return SurfaceScene(std::move(verts), std::move(prims));
}

// Measure-weighted cumulative distribution over primitives, for uniform
// surface sampling.
inline std::vector<double> measureCdf(const SurfaceScene& scene) {
  std::vector<double> cdf;
  double acc = 0;
  for (size_t i = 0; i < scene.primitives().size(); ++i) {
    acc += scene.primMeasure(static_cast<int>(i));
    cdf.push_back(acc);
  }
  return cdf;
}

inline Vec3 randomSurfacePoint(Rng& rng, const SurfaceScene& scene,
                               const std::vector<double>& cdf) {
  double u = rng.uniform() * cdf.back();
  size_t prim = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
  const auto& p = scene.primitives()[prim];
  if (p.dim == 1) {
    double a = rng.uniform();
    return scene.vertices()[p.v[0]] * (1 - a) + scene.vertices()[p.v[1]] * a;
  }
  double a = rng.uniform(), b = rng.uniform();
  if (a + b > 1) {
    a = 1 - a;
    b = 1 - b;
  }
  return scene.vertices()[p.v[0]] * (1 - a - b) + scene.vertices()[p.v[1]] * a +
         scene.vertices()[p.v[2]] * b;
}

// Flat unit-radius disk at z = 0: a center fan plus quad rings, +z normals.
// Vertex layout: 0 = center, then nSeg vertices per ring at radius i/nRings.
inline SurfaceScene diskMesh(int nRings, int nSeg) {
  std::vector<Vec3> verts;
  std::vector<ScenePrimitive> prims;
  verts.push_back({0, 0, 0});
  for (int i = 1; i <= nRings; ++i)
    for (int j = 0; j < nSeg; ++j) {
      double th = 2 * kPi * j / nSeg;
      double rad = double(i) / nRings;
      verts.push_back({rad * std::cos(th), rad * std::sin(th), 0});
    }
  auto at = [&](int i, int j) { return 1 + (i - 1) * nSeg + (j % nSeg); };
  auto tri = [&](int a, int b, int c) {
    ScenePrimitive p;
    p.dim = 2;
    p.v[0] = a;
    p.v[1] = b;
    p.v[2] = c;
    prims.push_back(p);
  };
  for (int j = 0; j < nSeg; ++j) tri(0, at(1, j), at(1, j + 1));
  for (int i = 1; i < nRings; ++i)
    for (int j = 0; j < nSeg; ++j) {
      tri(at(i, j), at(i + 1, j), at(i + 1, j + 1));
      tri(at(i, j), at(i + 1, j + 1), at(i, j + 1));
    }
  return SurfaceScene(std::move(verts), std::move(prims));
}

// Vertex indices of the disk's rim ring.
inline std::vector<int> diskRim(int nRings, int nSeg) {
  std::vector<int> rim;
  for (int j = 0; j < nSeg; ++j) rim.push_back(1 + (nRings - 1) * nSeg + j);
  return rim;
}

// Single curve segment from a to b.
inline SurfaceScene segmentCurve(const Vec3& a, const Vec3& b) {
  std::vector<Vec3> verts = {a, b};
  std::vector<ScenePrimitive> prims(1);
  prims[0].dim = 1;
  prims[0].v[0] = 0;
  prims[0].v[1] = 1;
  return SurfaceScene(std::move(verts), std::move(prims));
}

}  // namespace pwos::shapes
