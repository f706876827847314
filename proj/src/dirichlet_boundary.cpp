#include "pwos/dirichlet_boundary.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pwos/mesh_io.hpp"

namespace pwos {

namespace {

bool sameValue(const Vec3& a, const Vec3& b) {
  return a.x == b.x && a.y == b.y && a.z == b.z;
}

}  // namespace

DirichletBoundary::DirichletBoundary(std::vector<Vec3> vertices,
                                     std::vector<ScenePrimitive> elements,
                                     std::vector<BoundaryElementValues> values)
    : values_(std::move(values)) {
  if (elements.size() != values_.size())
    throw std::runtime_error("boundary: element/value count mismatch");
  for (const ScenePrimitive& e : elements)
    if (e.dim > 1) throw std::runtime_error("boundary elements must be points or segments");
  geo_ = SurfaceScene(std::move(vertices), std::move(elements));
  for (const BoundaryElementValues& v : values_)
    twoSided_ |= !sameValue(v.left[0], v.right[0]) || !sameValue(v.left[1], v.right[1]);
}

DirichletBoundary DirichletBoundary::points(const std::vector<Vec3>& positions,
                                            const std::vector<Vec3>& left,
                                            const std::vector<Vec3>& right) {
  if (positions.size() != left.size() || positions.size() != right.size())
    throw std::runtime_error("boundary points: value count mismatch");
  std::vector<ScenePrimitive> elems(positions.size());
  std::vector<BoundaryElementValues> vals(positions.size());
  for (size_t i = 0; i < positions.size(); ++i) {
    elems[i].dim = 0;
    elems[i].v[0] = static_cast<int>(i);
    vals[i].left[0] = vals[i].left[1] = left[i];
    vals[i].right[0] = vals[i].right[1] = right[i];
  }
  return DirichletBoundary(positions, std::move(elems), std::move(vals));
}

DirichletBoundary DirichletBoundary::points(const std::vector<Vec3>& positions,
                                            const std::vector<Vec3>& values) {
  return points(positions, values, values);
}

DirichletBoundary DirichletBoundary::polyline(const std::vector<Vec3>& vertices,
                                              const std::vector<std::pair<int, int>>& segments,
                                              const std::vector<Vec3>& left,
                                              const std::vector<Vec3>& right) {
  if (vertices.size() != left.size() || vertices.size() != right.size())
    throw std::runtime_error("boundary polyline: value count mismatch");
  std::vector<ScenePrimitive> elems(segments.size());
  std::vector<BoundaryElementValues> vals(segments.size());
  for (size_t i = 0; i < segments.size(); ++i) {
    elems[i].dim = 1;
    elems[i].v[0] = segments[i].first;
    elems[i].v[1] = segments[i].second;
    vals[i].left[0] = left[segments[i].first];
    vals[i].left[1] = left[segments[i].second];
    vals[i].right[0] = right[segments[i].first];
    vals[i].right[1] = right[segments[i].second];
  }
  return DirichletBoundary(vertices, std::move(elems), std::move(vals));
}

DirichletBoundary DirichletBoundary::polyline(const std::vector<Vec3>& vertices,
                                              const std::vector<std::pair<int, int>>& segments,
                                              const std::vector<Vec3>& values) {
  return polyline(vertices, segments, values, values);
}

DirichletBoundary DirichletBoundary::fromFiles(const std::string& objPath,
                                               const std::string& csvPath) {
  SceneGeometry geom = loadSceneGeometry(objPath);
  for (const ScenePrimitive& p : geom.primitives)
    if (p.dim > 1)
      throw std::runtime_error(objPath + ": boundary files may only contain l/p records");

  std::vector<BoundaryElementValues> vals(geom.primitives.size());
  std::ifstream in(csvPath);
  if (!in) throw std::runtime_error("cannot open " + csvPath);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) fields.push_back(std::stod(tok));
    if (fields.empty()) continue;
    long idx = static_cast<long>(fields[0]);
    if (idx < 0 || idx >= static_cast<long>(vals.size()))
      throw std::runtime_error(csvPath + ":" + std::to_string(lineNo) + ": element index out of range");
    BoundaryElementValues& v = vals[idx];
    size_t n = fields.size() - 1;
    Vec3 l, r;
    if (n == 1) {
      l = r = Vec3{fields[1], fields[1], fields[1]};
    } else if (n == 2) {
      l = Vec3{fields[1], fields[1], fields[1]};
      r = Vec3{fields[2], fields[2], fields[2]};
    } else if (n == 3) {
      l = r = Vec3{fields[1], fields[2], fields[3]};
    } else if (n == 6) {
      l = Vec3{fields[1], fields[2], fields[3]};
      r = Vec3{fields[4], fields[5], fields[6]};
    } else {
      throw std::runtime_error(csvPath + ":" + std::to_string(lineNo) + ": expected 1, 2, 3, or 6 values");
    }
    v.left[0] = v.left[1] = l;
    v.right[0] = v.right[1] = r;
  }
  return DirichletBoundary(std::move(geom.vertices), std::move(geom.primitives), std::move(vals));
}

double DirichletBoundary::side(const ClosestPointHit& hit, const Vec3& x,
                               const SurfaceScene& scene) const {
  Vec3 offset = x - hit.point;
  if (elementDim(hit.prim) == 1) {
    Vec3 t = geo_.frameAt(hit).tangent;
    ClosestPointHit sh = scene.closestPoint(hit.point);
    Vec3 n = scene.frameAt(sh).normal;
    return dot(cross(offset, t), n);
  }
  ClosestPointHit sh = scene.closestPoint(hit.point);
  Vec3 t = scene.frameAt(sh).tangent;
  return dot(offset, t);
}

Vec3 DirichletBoundary::valueOnSide(const ClosestPointHit& hit, double s) const {
  const BoundaryElementValues& v = values_[hit.prim];
  double t = elementDim(hit.prim) == 1 ? hit.bary[1] : 0.0;
  Vec3 l = v.left[0] * (1 - t) + v.left[1] * t;
  Vec3 r = v.right[0] * (1 - t) + v.right[1] * t;
  if (s > 0) return l;
  if (s < 0) return r;
  return (l + r) * 0.5;
}

Vec3 DirichletBoundary::value(const ClosestPointHit& hit, const Vec3& x,
                              const SurfaceScene& scene) const {
  const BoundaryElementValues& v = values_[hit.prim];
  bool needSide = !sameValue(v.left[0], v.right[0]) || !sameValue(v.left[1], v.right[1]);
  return valueOnSide(hit, needSide ? side(hit, x, scene) : 0.0);
}

}  // namespace pwos
