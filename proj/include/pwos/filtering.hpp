#pragma once

#include <string>
#include <vector>

#include "pwos/core.hpp"
#include "pwos/solver.hpp"

namespace pwos {

struct FilterEntry {
  int vertex;
  Vec3 weight;  // scalar filters carry the same weight in every lane
};

// One-step mean value filter over the scene's vertex basis. Each row holds
// the sparse weights of one projected sphere step from its evaluation point;
// boundary-shell hits and volume terms are folded into the constants, so an
// application is out = rows * values + constants.
//
// Scalar filters apply lane-wise (RGB data shares rows). Gradient filters
// (vectorValued) map the scalar lane of per-vertex estimates to tangentially
// projected gradient vectors and support exactly one application.
struct FilterOperator {
  std::vector<std::vector<FilterEntry>> rows;
  std::vector<Vec3> constants;
  std::vector<double> boundaryMass;  // weight mass folded into constants, per row
  int nFilterSamples = 0;
  bool vectorValued = false;
};

// Builds the solution filter for evaluation points that must be the scene's
// vertex set (index-aligned). Rows are deterministic in the config seed; the
// screened sphere weight is applied multiplicatively, never by roulette.
FilterOperator buildFilter(const WalkContext& ctx, const std::vector<Vec3>& evalPoints,
                           int nFilterSamples, int threads = 1);

// Gradient counterpart: sphere-term weights (3/r) n(y) per sample, volume
// constants against the kernel gradient, tangential projection baked into the
// rows. Scalar sources only.
FilterOperator buildGradientFilter(const WalkContext& ctx, const std::vector<Vec3>& evalPoints,
                                   int nFilterSamples, int threads = 1);

std::vector<Vec3> applyFilter(const FilterOperator& op, const std::vector<Vec3>& values,
                              int iterations);

// Sparse triplet dump for debugging: "row,col,wx,wy,wz" per weight, with the
// row constant on column -1 and the boundary mass on column -2.
void writeFilterCsv(const FilterOperator& op, const std::string& path);

}  // namespace pwos
