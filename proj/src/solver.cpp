#include "pwos/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "pwos/kernels.hpp"

namespace pwos {

void SolverConfig::validate() const {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (nPaths < 1) throw std::invalid_argument("nPaths must be at least 1");
  if (maxSteps < 1) throw std::invalid_argument("maxSteps must be at least 1");
  if (nVolume < 0) throw std::invalid_argument("nVolume must be nonnegative");
  if (sigma < 0) throw std::invalid_argument("sigma must be nonnegative");
  if (radiusCap > 0 && radiusCap <= epsilon)
    throw std::invalid_argument("radiusCap must exceed epsilon");
}

WalkContext::WalkContext(const SurfaceScene& scene, const DirichletBoundary* boundary,
                         const MedialAtlas* atlas, SolverConfig config, SourceTerm source)
    : scene_(&scene),
      boundary_(boundary && !boundary->empty() ? boundary : nullptr),
      atlas_(atlas),
      config_(config),
      source_(std::move(source)) {
  config_.validate();
  if (config_.lfsOverride <= 0 && atlas_ == nullptr)
    throw std::invalid_argument("walk context needs a medial atlas or an LFS override");
  if (source_.kind == SourceKind::Divergence && config_.sigma > 0)
    throw std::invalid_argument("divergence sources are limited to sigma = 0");
  if (source_.kind == SourceKind::Scalar && !source_.scalarField)
    throw std::invalid_argument("scalar source without a field");
  if (source_.kind == SourceKind::Divergence && !source_.vectorField)
    throw std::invalid_argument("divergence source without a field");
}

double WalkContext::localFeatureSize(const Vec3& x) const {
  if (config_.lfsOverride > 0) return config_.lfsOverride;
  return atlas_->localFeatureSize(x);
}

double WalkContext::extendedBoundaryDistance(const Vec3& x, ClosestPointHit* hitOut) const {
  if (boundary_ == nullptr) {
    if (hitOut) *hitOut = ClosestPointHit{};
    return kInf;
  }
  ClosestPointHit bh = boundary_->closest(x);
  if (hitOut) *hitOut = bh;
  Vec3 rvec = bh.point - x;

  // The boundary point sits on some surface patch whose free directions the
  // extension sweeps: a normal segment of half-length l on triangle patches, a
  // tangent-orthogonal disk of radius l on curve patches.
  ClosestPointHit sh = scene_->closestPoint(bh.point);
  double l = localFeatureSize(bh.point);
  int dim = sh.prim >= 0 ? scene_->patchDim(sh.prim) : 2;
  if (dim == 1) {
    Vec3 t = scene_->frameAt(sh).tangent;
    Vec3 q = rvec - t * dot(rvec, t);
    double qn = norm(q);
    if (qn < l) return std::abs(dot(rvec, t));
    return norm(rvec - q * (l / qn));
  }
  Vec3 n = scene_->frameAt(sh).normal;
  if (norm2(n) < 0.5) return bh.dist;  // unoriented cloud: fall back to raw distance
  double a = clamp(dot(rvec, n), -l, l);
  return norm(rvec - n * a);
}

double WalkContext::volumeTerm(const Vec3& x, double r, Rng& rng) const {
  double acc = 0;
  const int nv = config_.nVolume;
  if (source_.kind == SourceKind::None || nv == 0) return 0.0;
  if (source_.kind == SourceKind::Scalar) {
    for (int i = 0; i < nv; ++i) {
      BallSample bs = sampleBallInvDist(rng, x, r);
      double s = norm(bs.point - x);
      double g = config_.sigma > 0 ? greenBallScreened(s, r, config_.sigma) : greenBall(s, r);
      double f;
      if (source_.uniform) {
        f = source_.scalarField(x);
      } else {
        // x is on the surface, so the sample's projection distance is <= s.
        ClosestPointHit ph = scene_->closestPoint(bs.point, s * (1 + 1e-9) + 1e-300);
        f = source_.scalarField(ph.prim >= 0 ? ph.point : bs.point);
      }
      acc += g * f / bs.pdf;
    }
  } else {  // divergence form: -h(cp(z)) . grad_z G(x, z), sigma = 0
    for (int i = 0; i < nv; ++i) {
      BallSample bs = sampleBallInvDist2(rng, x, r);
      Vec3 svec = bs.point - x;
      double s = norm(svec);
      ClosestPointHit ph = scene_->closestPoint(bs.point, s * (1 + 1e-9) + 1e-300);
      Vec3 h = source_.vectorField(ph.prim >= 0 ? ph.point : bs.point);
      // grad_z G = (1/4pi) s_hat / s^2 for the negative-inside ball kernel;
      // with pdf = 1/(4 pi r s^2) the per-sample weight collapses to -r h.s_hat.
      acc += -r * dot(h, svec / s);
    }
  }
  return nv > 0 ? acc / nv : 0.0;
}

Vec3 WalkContext::volumeGradientTerm(const Vec3& x, double r, Rng& rng) const {
  Vec3 acc{0, 0, 0};
  const int nv = config_.nVolume;
  if (source_.kind != SourceKind::Scalar || nv == 0) return acc;
  for (int i = 0; i < nv; ++i) {
    BallSample bs = sampleBallInvDist2(rng, x, r);
    Vec3 svec = bs.point - x;
    Vec3 grad = config_.sigma > 0 ? greenGradCenterScreened(svec, r, config_.sigma)
                                  : greenGradCenter(svec, r);
    double f;
    if (source_.uniform) {
      f = source_.scalarField(x);
    } else {
      double s = norm(svec);
      ClosestPointHit ph = scene_->closestPoint(bs.point, s * (1 + 1e-9) + 1e-300);
      f = source_.scalarField(ph.prim >= 0 ? ph.point : bs.point);
    }
    acc += grad * (f / bs.pdf);
  }
  return acc / nv;
}

WalkContext::WalkResult WalkContext::walkOnce(const Vec3& x0, Rng& rng, WalkTrace* trace) const {
  WalkResult out;
  Vec3 x = x0;
  Vec3 acc{0, 0, 0};
  double weight = 1.0;  // deterministic screened mode only
  const bool screened = config_.sigma > 0;
  const bool roulette = config_.screenedMode == ScreenedMode::Roulette;

  for (int step = 0; step < config_.maxSteps; ++step) {
    out.steps = step + 1;
    ClosestPointHit bh;
    double delta = extendedBoundaryDistance(x, &bh);
    if (delta < config_.epsilon) {
      Vec3 bv = boundary_->value(bh, x, *scene_);
      out.value = acc + bv * weight;
      return out;
    }

    double r = std::min(localFeatureSize(x), delta);
    if (config_.radiusCap > 0) r = std::min(r, config_.radiusCap);
    if (trace) {
      trace->positions.push_back(x);
      trace->radii.push_back(r);
    }

    if (source_.kind != SourceKind::None && config_.nVolume > 0) {
      double v = volumeTerm(x, r, rng);
      acc += Vec3{v, v, v} * weight;
    }

    if (screened) {
      double c = screenedWeight(r, config_.sigma);
      if (roulette) {
        if (rng.uniform() >= c) {
          out.value = acc;
          return out;
        }
      } else {
        weight *= c;
      }
    }

    Vec3 y = sampleSphere(rng, x, r);
    ClosestPointHit ph = scene_->closestPoint(y, r * (1 + 1e-9));
    x = ph.prim >= 0 ? ph.point : scene_->closestPoint(y).point;
  }
  out.truncated = true;
  out.value = acc;
  return out;
}

namespace {

struct Accumulator {
  Vec3 sum{0, 0, 0};
  Vec3 sumSq{0, 0, 0};
  int64_t steps = 0;
  int truncated = 0;
  int n = 0;

  void add(const Vec3& v, int stepCount, bool wasTruncated) {
    sum += v;
    sumSq += v * v;
    steps += stepCount;
    truncated += wasTruncated ? 1 : 0;
    ++n;
  }

  Estimate finish() const {
    Estimate e;
    e.nPaths = n;
    e.maxStepsHit = truncated;
    if (n == 0) return e;
    e.mean = sum / double(n);
    e.avgSteps = double(steps) / double(n);
    if (n > 1) {
      Vec3 var = (sumSq - (sum * sum) / double(n)) / double(n - 1);
      e.stdError = Vec3{std::sqrt(std::max(var.x, 0.0)), std::sqrt(std::max(var.y, 0.0)),
                        std::sqrt(std::max(var.z, 0.0))} /
                   std::sqrt(double(n));
    }
    return e;
  }
};

}  // namespace

Estimate WalkContext::estimateSolution(const Vec3& x0, uint64_t pointIndex) const {
  Accumulator acc;
  for (int j = 0; j < config_.nPaths; ++j) {
    Rng rng = Rng::forStream(config_.seed, pointIndex, static_cast<uint64_t>(j));
    WalkResult w = walkOnce(x0, rng);
    acc.add(w.value, w.steps, w.truncated);
  }
  return acc.finish();
}

Estimate WalkContext::estimateGradient(const Vec3& x0, uint64_t pointIndex) const {
  if (source_.kind == SourceKind::Divergence)
    throw std::invalid_argument("gradient estimation supports scalar sources only");

  ClosestPointHit sh = scene_->closestPoint(x0);
  Frame frame = scene_->frameAt(sh);
  int dim = sh.prim >= 0 ? scene_->patchDim(sh.prim) : 2;

  Accumulator acc;
  const uint64_t substreamBase = uint64_t(1) << 32;  // disjoint from solution streams
  const double delta0 = extendedBoundaryDistance(x0);
  for (int j = 0; j < config_.nPaths; ++j) {
    Rng rng = Rng::forStream(config_.seed, pointIndex, substreamBase + static_cast<uint64_t>(j));
    double delta = delta0;
    Vec3 g{0, 0, 0};
    int steps = 1;
    bool truncated = false;
    if (delta >= config_.epsilon) {
      double r = std::min(localFeatureSize(x0), delta);
      if (config_.radiusCap > 0) r = std::min(r, config_.radiusCap);

      if (source_.kind == SourceKind::Scalar && config_.nVolume > 0)
        g += volumeGradientTerm(x0, r, rng);

      Vec3 y = sampleSphere(rng, x0, r);
      Vec3 nhat = (y - x0) / r;
      ClosestPointHit ph = scene_->closestPoint(y, r * (1 + 1e-9));
      Vec3 start = ph.prim >= 0 ? ph.point : scene_->closestPoint(y).point;
      WalkResult w = walkOnce(start, rng);
      double sphereWeight = 3.0 / r;
      if (config_.sigma > 0) sphereWeight *= screenedWeight(r, config_.sigma);
      g += nhat * (w.value.x * sphereWeight);
      steps = w.steps + 1;
      truncated = w.truncated;
    }
    // Tangential projection: drop the normal component (triangle patches) or
    // keep only the tangent component (curve patches).
    if (dim == 2) {
      g -= frame.normal * dot(g, frame.normal);
    } else if (dim == 1) {
      g = frame.tangent * dot(g, frame.tangent);
    }
    acc.add(g, steps, truncated);
  }
  return acc.finish();
}

}  // namespace pwos
