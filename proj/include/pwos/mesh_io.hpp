#pragma once

#include <string>
#include <vector>

#include "pwos/core.hpp"
#include "pwos/surface_scene.hpp"

namespace pwos {

struct SceneGeometry {
  std::vector<Vec3> vertices;
  std::vector<ScenePrimitive> primitives;
  std::vector<Vec3> normals;  // per-vertex, empty when the file carries none
};

// Reads .obj (v / f / l / p statements) or .ply (ascii or binary little
// endian). Throws std::runtime_error on malformed input.
SceneGeometry loadSceneGeometry(const std::string& path);

void writeObj(const std::string& path, const SceneGeometry& geom);

// Point cloud PLY with an optional extra scalar per point (e.g. ball radius
// or a solution value, under the given property name) and optional normals.
void writePointCloudPly(const std::string& path, const std::vector<Vec3>& points,
                        const std::vector<double>& scalar = {},
                        const std::string& scalarName = "value",
                        const std::vector<Vec3>& normals = {});

// Mesh PLY with optional per-vertex scalar and/or color.
void writeMeshPly(const std::string& path, const SceneGeometry& geom,
                  const std::vector<double>& scalar = {},
                  const std::string& scalarName = "value",
                  const std::vector<Vec3>& color = {});

// Binary PPM (P6) image writer; rgb is row-major, values in [0, 1].
void writePpm(const std::string& path, int width, int height, const std::vector<Vec3>& rgb);

}  // namespace pwos
