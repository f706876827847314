#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pwos/core.hpp"
#include "pwos/dirichlet_boundary.hpp"
#include "pwos/medial_atlas.hpp"
#include "pwos/rng.hpp"
#include "pwos/surface_scene.hpp"

namespace pwos {

enum class SourceKind { None, Scalar, Divergence };

// Right-hand side of the PDE. Scalar sources evaluate f at on-surface points;
// divergence sources supply the vector field h with f = div_S h, which the
// walk integrates against the kernel gradient so the divergence itself is
// never evaluated.
struct SourceTerm {
  SourceKind kind = SourceKind::None;
  std::function<double(const Vec3&)> scalarField;
  std::function<Vec3(const Vec3&)> vectorField;
  bool uniform = false;  // scalar field is constant: skip sample projection

  static SourceTerm none() { return {}; }
  static SourceTerm scalar(std::function<double(const Vec3&)> f, bool uniformField = false) {
    SourceTerm s;
    s.kind = SourceKind::Scalar;
    s.scalarField = std::move(f);
    s.uniform = uniformField;
    return s;
  }
  static SourceTerm divergence(std::function<Vec3(const Vec3&)> h) {
    SourceTerm s;
    s.kind = SourceKind::Divergence;
    s.vectorField = std::move(h);
    return s;
  }
};

// How the screened (sigma > 0) sphere-term weight is applied: Russian
// roulette path termination (production default) or deterministic
// multiplication (reference estimator for the unbiasedness check).
enum class ScreenedMode { Roulette, Deterministic };

struct SolverConfig {
  double epsilon = 1e-3;   // boundary shell thickness
  int nVolume = 32;        // volume samples per step (0 for Laplace)
  int nPaths = 64;         // walks per evaluation point
  double lambda = -1;      // feature-size floor handed to atlas construction
  double sigma = 0;        // screening coefficient
  int maxSteps = 10000;    // walk truncation bound
  double radiusCap = 0;    // optional max sphere radius; <= 0 disables
  uint64_t seed = 1;
  double lfsOverride = 0;  // > 0 forces a constant local feature size
  ScreenedMode screenedMode = ScreenedMode::Roulette;

  void validate() const;  // throws std::invalid_argument on bad values
};

// Monte Carlo estimate at one evaluation point. Scalar problems carry their
// value in all three lanes (the lanes share walks for vector-valued boundary
// data such as RGB diffusion curves).
struct Estimate {
  Vec3 mean{0, 0, 0};
  Vec3 stdError{0, 0, 0};
  int nPaths = 0;
  double avgSteps = 0;
  int maxStepsHit = 0;

  double scalar() const { return mean.x; }
  double scalarStdError() const { return stdError.x; }
};

// Optional per-step record of a walk, for invariant tests.
struct WalkTrace {
  std::vector<Vec3> positions;  // walk position at the start of each step
  std::vector<double> radii;    // sphere radius chosen at that position
};

// Immutable bundle of everything one walk needs. Boundary and atlas may be
// null (atlas must be present unless the config forces an LFS override).
class WalkContext {
 public:
  WalkContext(const SurfaceScene& scene, const DirichletBoundary* boundary,
              const MedialAtlas* atlas, SolverConfig config, SourceTerm source);

  const SurfaceScene& scene() const { return *scene_; }
  const SolverConfig& config() const { return config_; }
  const SourceTerm& source() const { return source_; }
  const DirichletBoundary* boundary() const { return boundary_; }  // null when absent

  double localFeatureSize(const Vec3& x) const;

  // Distance from x to the extended Dirichlet boundary (the boundary swept
  // over the normal/tangent degrees of freedom of its surface patch), without
  // constructing that geometry. +inf when there is no boundary. The optional
  // out-parameter receives the pre-extension closest boundary hit.
  double extendedBoundaryDistance(const Vec3& x, ClosestPointHit* hitOut = nullptr) const;

  struct WalkResult {
    Vec3 value{0, 0, 0};
    int steps = 0;
    bool truncated = false;
  };
  // One walk from the on-surface point x0. The terminating boundary check
  // counts as a step, so steps >= 1.
  WalkResult walkOnce(const Vec3& x0, Rng& rng, WalkTrace* trace = nullptr) const;

  Estimate estimateSolution(const Vec3& x0, uint64_t pointIndex) const;

  // Tangential gradient estimate: the first sphere is replaced by the
  // gradient-form estimator and the result is projected onto the tangent
  // plane (triangle patches) or tangent line (curve patches) at x0.
  Estimate estimateGradient(const Vec3& x0, uint64_t pointIndex) const;

  // One nVolume-sample Monte Carlo source contribution for a ball of radius r
  // about x (0 when there is no source or nVolume = 0). The gradient variant
  // integrates against the kernel gradient instead; scalar sources only.
  double volumeTerm(const Vec3& x, double r, Rng& rng) const;
  Vec3 volumeGradientTerm(const Vec3& x, double r, Rng& rng) const;

 private:
  const SurfaceScene* scene_;
  const DirichletBoundary* boundary_;
  const MedialAtlas* atlas_;
  SolverConfig config_;
  SourceTerm source_;
};

}  // namespace pwos
