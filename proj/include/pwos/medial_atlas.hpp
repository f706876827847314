#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pwos/core.hpp"
#include "pwos/point_index.hpp"
#include "pwos/rng.hpp"
#include "pwos/surface_scene.hpp"

namespace pwos {

// A medial ball tangent to the surface at `foot`, reached by shrinking along
// one of the two normal directions (side = +1 / -1).
struct MedialBall {
  Vec3 center;
  double radius = 0;
  Vec3 foot;
  int side = +1;
};

struct MedialParams {
  int seedCount = 100000;
  double scaling = 1.15;            // scale-axis pruning factor s > 1
  double lambda = -1;               // LFS floor; < 0 means 0.01 * bbox diagonal
  double conservativeFactor = 0.9;  // multiplies the nearest-center distance
  uint64_t seed = 1;
  int threads = 1;
};

// Point-cloud approximation of the medial axis, supporting conservative local
// feature size queries: lfs(x) = max(lambda, factor * dist to nearest center).
class MedialAtlas {
 public:
  MedialAtlas() = default;

  static std::vector<Vec3> scatterSeeds(const SurfaceScene& scene, int count, Rng& rng);

  // Shrinks a ball tangent at `foot` along the unit `direction` until the
  // center's closest surface point stops moving away from the foot. Returns
  // nothing if the iteration cap is hit without converging.
  static std::optional<MedialBall> shrinkBall(const SurfaceScene& scene, const Vec3& foot,
                                              const Vec3& direction, double initialRadius,
                                              double tolerance);

  // Scale-axis pruning: a ball is removed when its s-scaled version is fully
  // contained in the s-scaled version of a surviving larger ball. Processes in
  // descending radius so the result is independent of input order.
  static std::vector<MedialBall> prune(std::vector<MedialBall> balls, double scaling);

  static MedialAtlas extract(const SurfaceScene& scene, const MedialParams& params);

  double localFeatureSize(const Vec3& x) const;

  const std::vector<Vec3>& centers() const { return index_.points(); }
  const std::vector<double>& radii() const { return radii_; }
  double lambda() const { return lambda_; }
  double conservativeFactor() const { return factor_; }

  // Termination tolerance used for shrinking on this scene (mesh/curve scenes
  // use a fraction of the bbox diagonal; point clouds use their sampling
  // spacing).
  static double shrinkTolerance(const SurfaceScene& scene);

 private:
  PointSetIndex index_;
  std::vector<double> radii_;
  double lambda_ = 0;
  double factor_ = 0.9;
};

}  // namespace pwos
