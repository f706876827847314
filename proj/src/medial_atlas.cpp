#include "pwos/medial_atlas.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "pwos/parallel.hpp"

namespace pwos {

namespace {

// Static kd-style tree over ball centers used during pruning. Balls start
// inactive; survivors are activated as processing proceeds in descending
// radius order, and containment queries only consider active balls. Each node
// tracks the maximum active radius in its subtree for pruning the search.
class PruneIndex {
 public:
  explicit PruneIndex(const std::vector<MedialBall>& balls) : balls_(balls) {
    order_.resize(balls.size());
    std::iota(order_.begin(), order_.end(), 0);
    slot_.resize(balls.size());
    nodes_.reserve(2 * balls.size() + 1);
    if (!balls.empty()) build(0, static_cast<int>(balls.size()));
    for (size_t i = 0; i < order_.size(); ++i) slot_[order_[i]] = static_cast<int>(i);
  }

  void activate(int ballIdx) {
    if (nodes_.empty()) return;
    int pos = slot_[ballIdx];
    double r = balls_[ballIdx].radius;
    int node = 0;
    for (;;) {
      Node& n = nodes_[node];
      n.activeMax = std::max(n.activeMax, r);
      if (n.left < 0) break;
      node = pos < nodes_[n.left].end ? n.left : n.right;
    }
    active_[ballIdx] = 1;
  }

  // True when some active ball B_{r2}(x2) satisfies s*r1 + |x1-x2| <= s*r2.
  bool covered(const Vec3& x1, double r1, double s) const {
    if (nodes_.empty()) return false;
    return coveredRec(0, x1, r1, s);
  }

 private:
  struct Node {
    Aabb box;
    double activeMax = -kInf;
    int begin = 0, end = 0;
    int left = -1, right = -1;
  };

  int build(int begin, int end) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{});
    Aabb box;
    for (int i = begin; i < end; ++i) box.expand(balls_[order_[i]].center);
    nodes_[id].box = box;
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    if (end - begin > kLeafSize) {
      Vec3 ext = box.extent();
      int axis = 0;
      if (ext.y > ext.x) axis = 1;
      if (ext.z > ext[axis]) axis = 2;
      int mid = (begin + end) / 2;
      std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                       [&](int a, int b) {
                         double ca = balls_[a].center[axis], cb = balls_[b].center[axis];
                         return ca < cb || (ca == cb && a < b);
                       });
      int left = build(begin, mid);
      int right = build(mid, end);
      nodes_[id].left = left;
      nodes_[id].right = right;
    }
    return id;
  }

  bool coveredRec(int node, const Vec3& x1, double r1, double s) const {
    const Node& n = nodes_[node];
    if (n.activeMax <= r1) {
      // Need r2 > r1 strictly unless centers coincide; the cheap bound below
      // covers the r2 == r1 case only at distance 0, so check leaves anyway.
      if (n.activeMax < r1) return false;
    }
    double bound = s * (n.activeMax - r1);
    if (bound < 0 || n.box.distance2(x1) > bound * bound) return false;
    if (n.left < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        int b = order_[i];
        if (!active_[b]) continue;
        const MedialBall& ball = balls_[b];
        if (s * r1 + norm(x1 - ball.center) <= s * ball.radius) return true;
      }
      return false;
    }
    return coveredRec(n.left, x1, r1, s) || coveredRec(n.right, x1, r1, s);
  }

  static constexpr int kLeafSize = 8;

  const std::vector<MedialBall>& balls_;
  std::vector<Node> nodes_;
  std::vector<int> order_;
  std::vector<int> slot_;
  std::vector<char> active_ = std::vector<char>(balls_.size(), 0);
};

}  // namespace

std::vector<Vec3> MedialAtlas::scatterSeeds(const SurfaceScene& scene, int count, Rng& rng) {
  Vec3 c = scene.bounds().center();
  double radius = 0.5 * scene.bounds().diagonal();
  std::vector<Vec3> seeds;
  seeds.reserve(count);
  for (int i = 0; i < count; ++i) seeds.push_back(c + rng.inBall(radius));
  return seeds;
}

double MedialAtlas::shrinkTolerance(const SurfaceScene& scene) {
  bool pureCloud = true;
  for (const auto& p : scene.primitives())
    if (p.dim > 0) { pureCloud = false; break; }
  double diag = scene.bounds().diagonal();
  if (!pureCloud || scene.vertices().size() < 2) return 1e-4 * diag;
  // Point clouds: tolerance tied to sampling density (median NN spacing).
  PointSetIndex index(scene.vertices());
  std::vector<double> spacing;
  spacing.reserve(scene.vertices().size());
  for (size_t i = 0; i < scene.vertices().size(); ++i) {
    auto nn = index.nearest(scene.vertices()[i], kInf, static_cast<int>(i));
    if (nn.index >= 0) spacing.push_back(nn.dist);
  }
  std::nth_element(spacing.begin(), spacing.begin() + spacing.size() / 2, spacing.end());
  return 2.0 * spacing[spacing.size() / 2];
}

std::optional<MedialBall> MedialAtlas::shrinkBall(const SurfaceScene& scene, const Vec3& foot,
                                                 const Vec3& direction, double initialRadius,
                                                 double tolerance) {
  double r = initialRadius;
  constexpr int kMaxIter = 50;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    Vec3 center = foot + direction * r;
    ClosestPointHit hit = scene.closestPoint(center, r * (1 + 1e-9) + tolerance);
    if (hit.prim < 0 || norm(hit.point - foot) < tolerance) {
      MedialBall ball;
      ball.center = center;
      ball.radius = r;
      ball.foot = foot;
      return ball;
    }
    Vec3 toQ = hit.point - foot;
    double denom = 2.0 * dot(toQ, direction);
    if (denom <= 1e-300) return std::nullopt;  // contact behind the tangent plane
    double rNew = norm2(toQ) / denom;
    if (!(rNew > 0) || rNew >= r * (1 - 1e-12)) {
      // Radius fixed point: equidistant contacts (e.g. symmetric geometry).
      MedialBall ball;
      ball.center = center;
      ball.radius = r;
      ball.foot = foot;
      return ball;
    }
    r = rNew;
  }
  return std::nullopt;
}

std::vector<MedialBall> MedialAtlas::prune(std::vector<MedialBall> balls, double scaling) {
  std::vector<int> order(balls.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (balls[a].radius != balls[b].radius) return balls[a].radius > balls[b].radius;
    return a < b;
  });
  PruneIndex index(balls);
  std::vector<MedialBall> out;
  out.reserve(balls.size());
  for (int idx : order) {
    const MedialBall& ball = balls[idx];
    if (index.covered(ball.center, ball.radius, scaling)) continue;
    index.activate(idx);
    out.push_back(ball);
  }
  return out;
}

MedialAtlas MedialAtlas::extract(const SurfaceScene& scene, const MedialParams& params) {
  if (params.seedCount < 1) throw std::invalid_argument("seedCount must be >= 1");
  if (params.scaling <= 1.0) throw std::invalid_argument("scaling must be > 1");

  Rng rng(params.seed);
  std::vector<Vec3> seeds = scatterSeeds(scene, params.seedCount, rng);
  double diag = scene.bounds().diagonal();
  double tol = shrinkTolerance(scene);

  // Two tangent balls per seed, one on each side of the surface. The shrink
  // direction must be exactly normal to the hit patch: an oblique direction on
  // a faceted mesh makes the center's closest point creep along the patch and
  // the radius collapse. The seed offset only picks which side is "+".
  // Slots are preallocated so the result does not depend on thread scheduling.
  std::vector<std::optional<MedialBall>> slots(2 * seeds.size());
  parallelFor(params.threads, static_cast<int64_t>(seeds.size()), [&](int64_t i) {
    ClosestPointHit hit = scene.closestPoint(seeds[i]);
    if (hit.prim < 0) return;
    Vec3 offset = seeds[i] - hit.point;
    double len = norm(offset);
    Frame f = scene.frameAt(hit);
    int dim = scene.patchDim(hit.prim);
    Vec3 dir;
    if (dim == 2) {
      dir = f.normal;
    } else if (dim == 1) {
      Vec3 perp = offset - f.tangent * dot(offset, f.tangent);
      if (norm(perp) > 1e-10 * diag) {
        dir = normalize(perp);
      } else {
        Vec3 axis = std::abs(f.tangent.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        dir = normalize(cross(f.tangent, axis));
      }
    } else {
      dir = len > 1e-12 * diag ? offset / len : Vec3{0, 0, 1};
    }
    if (dot(dir, offset) < 0) dir = -dir;
    auto plus = shrinkBall(scene, hit.point, dir, diag, tol);
    auto minus = shrinkBall(scene, hit.point, -dir, diag, tol);
    if (plus) plus->side = +1;
    if (minus) minus->side = -1;
    slots[2 * i] = plus;
    slots[2 * i + 1] = minus;
  });

  // Pair reduction: the larger tangent ball of each pair is replaced by one
  // with the smaller ball's radius, i.e. the pair collapses to its smaller
  // ball. Unbounded outside balls would otherwise wipe out stable medial
  // features during pruning, and on tessellated surfaces the mirrored copies
  // of crease-limited balls would survive as spurious feature-size dips.
  std::vector<MedialBall> balls;
  balls.reserve(slots.size());
  for (size_t i = 0; i < seeds.size(); ++i) {
    auto& plus = slots[2 * i];
    auto& minus = slots[2 * i + 1];
    if (plus && minus) {
      balls.push_back(plus->radius <= minus->radius ? *plus : *minus);
    } else if (plus) {
      balls.push_back(*plus);
    } else if (minus) {
      balls.push_back(*minus);
    }
  }
  if (balls.empty()) throw std::runtime_error("medial extraction failed: no ball converged");

  balls = prune(std::move(balls), params.scaling);

  MedialAtlas atlas;
  std::vector<Vec3> centers;
  centers.reserve(balls.size());
  atlas.radii_.reserve(balls.size());
  for (const MedialBall& b : balls) {
    centers.push_back(b.center);
    atlas.radii_.push_back(b.radius);
  }
  atlas.index_ = PointSetIndex(std::move(centers));
  atlas.lambda_ = params.lambda > 0 ? params.lambda : 0.01 * diag;
  atlas.factor_ = params.conservativeFactor;
  return atlas;
}

double MedialAtlas::localFeatureSize(const Vec3& x) const {
  if (index_.empty()) return lambda_;
  auto nn = index_.nearest(x);
  return std::max(lambda_, factor_ * nn.dist);
}

}  // namespace pwos
