#include "pwos/filtering.hpp"

#include <fstream>
#include <map>
#include <stdexcept>

#include "pwos/kernels.hpp"
#include "pwos/parallel.hpp"

namespace pwos {

namespace {

void requireVertexAlignment(const WalkContext& ctx, const std::vector<Vec3>& evalPoints) {
  const auto& verts = ctx.scene().vertices();
  if (evalPoints.size() != verts.size())
    throw std::invalid_argument("filter evaluation points must be the scene vertex set");
  for (size_t i = 0; i < verts.size(); ++i)
    if (norm2(evalPoints[i] - verts[i]) != 0.0)
      throw std::invalid_argument("filter evaluation point does not match its scene vertex");
}

void flattenRow(const std::map<int, Vec3>& accum, std::vector<FilterEntry>& row) {
  row.reserve(accum.size());
  for (const auto& [vertex, weight] : accum) row.push_back({vertex, weight});
}

// Projects y onto the scene with the walk's bounded-query hint.
ClosestPointHit projectSample(const SurfaceScene& scene, const Vec3& y, double r) {
  ClosestPointHit ph = scene.closestPoint(y, r * (1 + 1e-9));
  return ph.prim >= 0 ? ph : scene.closestPoint(y);
}

}  // namespace

FilterOperator buildFilter(const WalkContext& ctx, const std::vector<Vec3>& evalPoints,
                           int nFilterSamples, int threads) {
  if (nFilterSamples < 1) throw std::invalid_argument("nFilterSamples must be at least 1");
  requireVertexAlignment(ctx, evalPoints);

  const SurfaceScene& scene = ctx.scene();
  const SolverConfig& cfg = ctx.config();
  const uint64_t substream = uint64_t(2) << 32;  // disjoint from walk substreams

  FilterOperator op;
  op.nFilterSamples = nFilterSamples;
  op.rows.resize(evalPoints.size());
  op.constants.assign(evalPoints.size(), Vec3{0, 0, 0});
  op.boundaryMass.assign(evalPoints.size(), 0.0);

  parallelFor(threads, static_cast<int64_t>(evalPoints.size()), [&](int64_t i) {
    const Vec3& x = evalPoints[i];
    Rng rng = Rng::forStream(cfg.seed, static_cast<uint64_t>(i), substream);

    ClosestPointHit bh;
    double delta = ctx.extendedBoundaryDistance(x, &bh);
    if (delta < cfg.epsilon) {
      op.constants[i] = ctx.boundary()->value(bh, x, scene);
      op.boundaryMass[i] = 1.0;
      return;
    }

    double r = std::min(ctx.localFeatureSize(x), delta);
    if (cfg.radiusCap > 0) r = std::min(r, cfg.radiusCap);
    double c = cfg.sigma > 0 ? screenedWeight(r, cfg.sigma) : 1.0;
    double share = c / nFilterSamples;

    if (ctx.source().kind != SourceKind::None && cfg.nVolume > 0) {
      double v = ctx.volumeTerm(x, r, rng);
      op.constants[i] += Vec3{v, v, v};
    }

    std::map<int, Vec3> accum;
    for (int j = 0; j < nFilterSamples; ++j) {
      Vec3 y = sampleSphere(rng, x, r);
      ClosestPointHit ph = projectSample(scene, y, r);

      ClosestPointHit bh2;
      if (ctx.extendedBoundaryDistance(ph.point, &bh2) < cfg.epsilon) {
        op.constants[i] += ctx.boundary()->value(bh2, ph.point, scene) * share;
        op.boundaryMass[i] += share;
        continue;
      }
      const ScenePrimitive& p = scene.primitives()[ph.prim];
      for (int k = 0; k <= p.dim; ++k)
        accum[p.v[k]] += Vec3{1, 1, 1} * (share * ph.bary[k]);
    }
    flattenRow(accum, op.rows[i]);
  });
  return op;
}

FilterOperator buildGradientFilter(const WalkContext& ctx, const std::vector<Vec3>& evalPoints,
                                   int nFilterSamples, int threads) {
  if (nFilterSamples < 1) throw std::invalid_argument("nFilterSamples must be at least 1");
  if (ctx.source().kind == SourceKind::Divergence)
    throw std::invalid_argument("gradient filters support scalar sources only");
  requireVertexAlignment(ctx, evalPoints);

  const SurfaceScene& scene = ctx.scene();
  const SolverConfig& cfg = ctx.config();
  const uint64_t substream = uint64_t(3) << 32;

  FilterOperator op;
  op.nFilterSamples = nFilterSamples;
  op.vectorValued = true;
  op.rows.resize(evalPoints.size());
  op.constants.assign(evalPoints.size(), Vec3{0, 0, 0});
  op.boundaryMass.assign(evalPoints.size(), 0.0);

  parallelFor(threads, static_cast<int64_t>(evalPoints.size()), [&](int64_t i) {
    const Vec3& x = evalPoints[i];
    Rng rng = Rng::forStream(cfg.seed, static_cast<uint64_t>(i), substream);

    double delta = ctx.extendedBoundaryDistance(x);
    if (delta < cfg.epsilon) return;  // gradient inside the shell is defined as zero

    double r = std::min(ctx.localFeatureSize(x), delta);
    if (cfg.radiusCap > 0) r = std::min(r, cfg.radiusCap);
    double scale = 3.0 / r;
    if (cfg.sigma > 0) scale *= screenedWeight(r, cfg.sigma);

    Vec3 constant{0, 0, 0};
    if (ctx.source().kind == SourceKind::Scalar && cfg.nVolume > 0)
      constant += ctx.volumeGradientTerm(x, r, rng);

    std::map<int, Vec3> accum;
    for (int j = 0; j < nFilterSamples; ++j) {
      Vec3 y = sampleSphere(rng, x, r);
      Vec3 w = (y - x) * (scale / (r * nFilterSamples));  // (3/r) n(y) / n

      ClosestPointHit ph = projectSample(scene, y, r);
      ClosestPointHit bh2;
      if (ctx.extendedBoundaryDistance(ph.point, &bh2) < cfg.epsilon) {
        constant += w * ctx.boundary()->value(bh2, ph.point, scene).x;
        continue;
      }
      const ScenePrimitive& p = scene.primitives()[ph.prim];
      for (int k = 0; k <= p.dim; ++k) accum[p.v[k]] += w * ph.bary[k];
    }

    // Bake the tangential projection into weights and constants (linear).
    ClosestPointHit sh = scene.closestPoint(x);
    Frame frame = scene.frameAt(sh);
    int dim = sh.prim >= 0 ? scene.patchDim(sh.prim) : 2;
    auto project = [&](const Vec3& g) {
      if (dim == 2) return g - frame.normal * dot(g, frame.normal);
      if (dim == 1) return frame.tangent * dot(g, frame.tangent);
      return g;
    };
    op.constants[i] = project(constant);
    for (auto& [vertex, weight] : accum) weight = project(weight);
    flattenRow(accum, op.rows[i]);
  });
  return op;
}

std::vector<Vec3> applyFilter(const FilterOperator& op, const std::vector<Vec3>& values,
                              int iterations) {
  if (values.size() != op.rows.size())
    throw std::invalid_argument("filter input length does not match the operator");
  if (iterations < 0) throw std::invalid_argument("iterations must be nonnegative");
  if (op.vectorValued && iterations > 1)
    throw std::invalid_argument("gradient filters support a single application");

  std::vector<Vec3> cur = values;
  std::vector<Vec3> next(values.size());
  for (int it = 0; it < iterations; ++it) {
    for (size_t i = 0; i < op.rows.size(); ++i) {
      Vec3 v = op.constants[i];
      for (const FilterEntry& e : op.rows[i]) v += e.weight * cur[e.vertex];
      next[i] = v;
    }
    cur.swap(next);
  }
  return cur;
}

void writeFilterCsv(const FilterOperator& op, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "row,col,wx,wy,wz\n";
  for (size_t i = 0; i < op.rows.size(); ++i) {
    for (const FilterEntry& e : op.rows[i])
      out << i << ',' << e.vertex << ',' << e.weight.x << ',' << e.weight.y << ','
          << e.weight.z << '\n';
    const Vec3& c = op.constants[i];
    out << i << ",-1," << c.x << ',' << c.y << ',' << c.z << '\n';
    out << i << ",-2," << op.boundaryMass[i] << ",0,0\n";
  }
}

}  // namespace pwos
