#include <doctest.h>

#include <algorithm>

#include "pwos/core.hpp"
#include "pwos/medial_atlas.hpp"
#include "pwos/rng.hpp"
#include "pwos/surface_scene.hpp"

using namespace pwos;

namespace {

SurfaceScene uvSphere(int nLat, int nLon, double radius) {
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
    p.dim = 2; p.v[0] = a; p.v[1] = b; p.v[2] = c;
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

SurfaceScene uvTorus(int nU, int nV, double R, double r) {
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
      p.v[0] = at(i, j); p.v[1] = at(i + 1, j); p.v[2] = at(i + 1, j + 1);
      prims.push_back(p);
      p.v[0] = at(i, j); p.v[1] = at(i + 1, j + 1); p.v[2] = at(i, j + 1);
      prims.push_back(p);
    }
  return SurfaceScene(std::move(verts), std::move(prims));
}

// Two horizontal square grids (z = z0 and z = z1).
SurfaceScene parallelPlanes(int n, double halfSize, double z0, double z1) {
  std::vector<Vec3> verts;
  std::vector<ScenePrimitive> prims;
  for (double z : {z0, z1}) {
    int base = static_cast<int>(verts.size());
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        verts.push_back({-halfSize + 2 * halfSize * i / n, -halfSize + 2 * halfSize * j / n, z});
    auto at = [&](int i, int j) { return base + i * (n + 1) + j; };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        ScenePrimitive p;
        p.dim = 2;
        p.v[0] = at(i, j); p.v[1] = at(i + 1, j); p.v[2] = at(i + 1, j + 1);
        prims.push_back(p);
        p.v[0] = at(i, j); p.v[1] = at(i + 1, j + 1); p.v[2] = at(i, j + 1);
        prims.push_back(p);
      }
  }
  return SurfaceScene(std::move(verts), std::move(prims));
}

Vec3 randomSurfacePoint(Rng& rng, const SurfaceScene& scene, const std::vector<double>& cdf) {
  double u = rng.uniform() * cdf.back();
  size_t prim = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
  const auto& p = scene.primitives()[prim];
  double a = rng.uniform(), b = rng.uniform();
  if (a + b > 1) { a = 1 - a; b = 1 - b; }
  return scene.vertices()[p.v[0]] * (1 - a - b) + scene.vertices()[p.v[1]] * a +
         scene.vertices()[p.v[2]] * b;
}

std::vector<double> areaCdf(const SurfaceScene& scene) {
  std::vector<double> cdf;
  double acc = 0;
  for (size_t i = 0; i < scene.primitives().size(); ++i) {
    acc += scene.primMeasure(static_cast<int>(i));
    cdf.push_back(acc);
  }
  return cdf;
}

// Order-independent reference pruning, quadratic scan.
std::vector<MedialBall> bruteForcePrune(std::vector<MedialBall> balls, double s) {
  std::vector<int> order(balls.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (balls[a].radius != balls[b].radius) return balls[a].radius > balls[b].radius;
    return a < b;
  });
  std::vector<MedialBall> out;
  for (int idx : order) {
    bool contained = false;
    for (const MedialBall& keep : out) {
      if (s * balls[idx].radius + norm(balls[idx].center - keep.center) <= s * keep.radius) {
        contained = true;
        break;
      }
    }
    if (!contained) out.push_back(balls[idx]);
  }
  return out;
}

}  // namespace

TEST_SUITE("medial") {

TEST_CASE("scatter seeds: containment, centering, determinism") {
  SurfaceScene scene = uvSphere(12, 18, 1.0);
  Vec3 c = scene.bounds().center();
  double radius = 0.5 * scene.bounds().diagonal();
  Rng rng(7);
  auto seeds = MedialAtlas::scatterSeeds(scene, 20000, rng);
  REQUIRE(seeds.size() == 20000);
  Vec3 mean{};
  for (const Vec3& s : seeds) {
    CHECK(norm(s - c) <= radius * (1 + 1e-12));
    mean += s;
  }
  mean /= static_cast<double>(seeds.size());
  // CLT bound: per-axis std of uniform ball is radius * sqrt(1/5).
  double tol = 4.0 * radius * std::sqrt(0.2) / std::sqrt(20000.0);
  CHECK(norm(mean - c) < 2 * tol);

  Rng rng2(7);
  auto seeds2 = MedialAtlas::scatterSeeds(scene, 20000, rng2);
  for (size_t i = 0; i < seeds.size(); ++i) CHECK(seeds[i] == seeds2[i]);
}

TEST_CASE("shrink ball: unit sphere collapses inward, stays at cap outward") {
  SurfaceScene scene = uvSphere(40, 60, 1.0);
  double diag = scene.bounds().diagonal();
  double tol = MedialAtlas::shrinkTolerance(scene);
  ClosestPointHit hit = scene.closestPoint({2.0, 0.3, 0.1});
  Vec3 foot = hit.point;
  // Shrink directions must be normal to the facet actually hit; the analytic
  // sphere normal is slightly oblique to it and would not stay tangent.
  Vec3 inward = -scene.frameAt(hit).normal;
  if (dot(inward, foot) > 0) inward = -inward;

  auto inner = MedialAtlas::shrinkBall(scene, foot, inward, diag, tol);
  REQUIRE(inner.has_value());
  // A foot near a facet crease stops at the crease's wedge sheet, so the
  // radius lands anywhere between the crease-limited value and the analytic 1.
  CHECK(inner->radius > 0.2);
  CHECK(inner->radius < 1.005);
  CHECK(norm(inner->center - inner->foot) == doctest::Approx(inner->radius).epsilon(1e-9));
  // Converged ball is empty: nothing penetrates deeper than the tolerance.
  ClosestPointHit probe = scene.closestPoint(inner->center);
  CHECK(probe.dist >= inner->radius - 2 * tol);

  auto outer = MedialAtlas::shrinkBall(scene, foot, -inward, diag, tol);
  REQUIRE(outer.has_value());
  CHECK(outer->radius == doctest::Approx(diag).epsilon(1e-12));

  // At a facet centroid the crease sheets are farthest away and the discrete
  // ball approaches the analytic unit ball.
  Vec3 best{0, 0, 0};
  double bestMargin = -1.0;
  for (const ScenePrimitive& p : scene.primitives()) {
    Vec3 c = (scene.vertices()[p.v[0]] + scene.vertices()[p.v[1]] + scene.vertices()[p.v[2]]) / 3.0;
    if (c.x > bestMargin) {
      bestMargin = c.x;
      best = c;
    }
  }
  ClosestPointHit hit2 = scene.closestPoint(best * 2.0);
  Vec3 in2 = -scene.frameAt(hit2).normal;
  if (dot(in2, hit2.point) > 0) in2 = -in2;
  auto inner2 = MedialAtlas::shrinkBall(scene, hit2.point, in2, diag, tol);
  REQUIRE(inner2.has_value());
  CHECK(inner2->radius == doctest::Approx(1.0).epsilon(0.55));
  CHECK(inner2->radius < 1.005);
}

TEST_CASE("shrink ball: two parallel planes meet in the middle") {
  SurfaceScene scene = parallelPlanes(20, 2.0, 0.0, 2.0);
  double tol = MedialAtlas::shrinkTolerance(scene);
  ClosestPointHit hit = scene.closestPoint({0.13, -0.22, -0.5});
  REQUIRE(hit.point.z == doctest::Approx(0.0));
  auto ball = MedialAtlas::shrinkBall(scene, hit.point, {0, 0, 1}, scene.bounds().diagonal(), tol);
  REQUIRE(ball.has_value());
  CHECK(ball->radius == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ball->center.z == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("shrink ball: flat plane along outward direction keeps the cap") {
  SurfaceScene scene = parallelPlanes(10, 1.0, 0.0, 5.0);
  double tol = MedialAtlas::shrinkTolerance(scene);
  ClosestPointHit hit = scene.closestPoint({0.05, 0.07, -1.0});
  auto ball = MedialAtlas::shrinkBall(scene, hit.point, {0, 0, -1}, 3.0, tol);
  REQUIRE(ball.has_value());
  CHECK(ball->radius == doctest::Approx(3.0));
}

TEST_CASE("prune: containment examples") {
  auto mk = [](Vec3 c, double r) {
    MedialBall b;
    b.center = c;
    b.radius = r;
    b.foot = c + Vec3{r, 0, 0};
    return b;
  };
  SUBCASE("identical balls collapse to one") {
    std::vector<MedialBall> balls = {mk({0, 0, 0}, 1.0), mk({0, 0, 0}, 1.0)};
    auto out = MedialAtlas::prune(balls, 1.15);
    CHECK(out.size() == 1);
  }
  SUBCASE("nearby smaller ball removed") {
    // s*r1 + d <= s*r2 : 1.15 + 0.1 <= 2.3
    std::vector<MedialBall> balls = {mk({0.1, 0, 0}, 1.0), mk({0, 0, 0}, 2.0)};
    auto out = MedialAtlas::prune(balls, 1.15);
    REQUIRE(out.size() == 1);
    CHECK(out[0].radius == 2.0);
  }
  SUBCASE("distant balls both survive") {
    std::vector<MedialBall> balls = {mk({10, 0, 0}, 1.0), mk({0, 0, 0}, 2.0)};
    auto out = MedialAtlas::prune(balls, 1.15);
    CHECK(out.size() == 2);
  }
}

TEST_CASE("prune: matches quadratic reference and is monotone in s") {
  Rng rng(12);
  std::vector<MedialBall> balls;
  for (int i = 0; i < 600; ++i) {
    MedialBall b;
    b.center = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    b.radius = rng.uniform(0.05, 1.5);
    b.foot = b.center + Vec3{b.radius, 0, 0};
    balls.push_back(b);
  }
  size_t prevCount = balls.size() + 1;
  for (double s : {1.05, 1.15, 1.5, 3.0}) {
    auto fast = MedialAtlas::prune(balls, s);
    auto slow = bruteForcePrune(balls, s);
    REQUIRE(fast.size() == slow.size());
    for (size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i].center == slow[i].center);
      CHECK(fast[i].radius == slow[i].radius);
    }
    CHECK(fast.size() <= prevCount);
    prevCount = fast.size();
    // Survivors are a subset of the input.
    for (const auto& b : fast) {
      bool found = false;
      for (const auto& src : balls) found |= (src.center == b.center && src.radius == b.radius);
      CHECK(found);
    }
  }
}

TEST_CASE("extract: unit sphere atlas gives conservative feature size") {
  SurfaceScene scene = uvSphere(32, 48, 1.0);
  MedialParams params;
  params.seedCount = 4000;
  params.seed = 11;
  MedialAtlas atlas = MedialAtlas::extract(scene, params);
  REQUIRE(!atlas.centers().empty());

  // The interior medial axis of the sphere is its center.
  double closestToOrigin = kInf;
  for (const Vec3& c : atlas.centers()) closestToOrigin = std::min(closestToOrigin, norm(c));
  CHECK(closestToOrigin < 0.1);

  auto cdf = areaCdf(scene);
  Rng rng(3);
  int conservative = 0;
  const int nProbe = 2000;
  for (int i = 0; i < nProbe; ++i) {
    Vec3 x = randomSurfacePoint(rng, scene, cdf);
    double lfs = atlas.localFeatureSize(x);
    CHECK(lfs >= atlas.lambda());
    if (lfs <= 1.0 * 1.02) ++conservative;
    CHECK(lfs > 0.5);  // sanity: not collapsed to the floor
  }
  CHECK(conservative >= nProbe * 99 / 100);

  // Determinism: same parameters, same atlas.
  MedialAtlas atlas2 = MedialAtlas::extract(scene, params);
  REQUIRE(atlas2.centers().size() == atlas.centers().size());
  for (size_t i = 0; i < atlas.centers().size(); ++i) {
    CHECK(atlas.centers()[i] == atlas2.centers()[i]);
    CHECK(atlas.radii()[i] == atlas2.radii()[i]);
  }
}

TEST_CASE("extract: torus atlas is conservative w.r.t. the tube radius") {
  SurfaceScene scene = uvTorus(90, 30, 3.0, 1.0);
  MedialParams params;
  params.seedCount = 8000;
  params.seed = 5;
  MedialAtlas atlas = MedialAtlas::extract(scene, params);
  REQUIRE(!atlas.centers().empty());

  // Interior centers should include points near the core circle radius 3.
  int nearCore = 0;
  for (const Vec3& c : atlas.centers()) {
    double rho = std::sqrt(c.x * c.x + c.y * c.y);
    if (std::abs(rho - 3.0) < 0.15 && std::abs(c.z) < 0.15) ++nearCore;
  }
  CHECK(nearCore > 0);

  auto cdf = areaCdf(scene);
  Rng rng(8);
  int conservative = 0;
  const int nProbe = 2000;
  for (int i = 0; i < nProbe; ++i) {
    Vec3 x = randomSurfacePoint(rng, scene, cdf);
    double lfs = atlas.localFeatureSize(x);
    CHECK(lfs >= atlas.lambda());
    if (lfs <= 1.0 * 1.02) ++conservative;
  }
  CHECK(conservative >= nProbe * 99 / 100);
}

TEST_CASE("local feature size matches a linear scan") {
  SurfaceScene scene = uvSphere(16, 24, 1.0);
  MedialParams params;
  params.seedCount = 1500;
  params.seed = 2;
  MedialAtlas atlas = MedialAtlas::extract(scene, params);
  Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    Vec3 q{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    double best = kInf;
    for (const Vec3& c : atlas.centers()) best = std::min(best, norm(q - c));
    double expected = std::max(atlas.lambda(), atlas.conservativeFactor() * best);
    CHECK(atlas.localFeatureSize(q) == doctest::Approx(expected).epsilon(1e-12));
  }
}

}  // TEST_SUITE
