#include "pwos/mesh_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pwos {

namespace {

std::string lowerExt(const std::string& path) {
  auto pos = path.find_last_of('.');
  if (pos == std::string::npos) return "";
  std::string ext = path.substr(pos + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

int resolveObjIndex(long idx, size_t count, const std::string& path) {
  long v = idx > 0 ? idx - 1 : static_cast<long>(count) + idx;
  if (v < 0 || v >= static_cast<long>(count))
    throw std::runtime_error(path + ": vertex index out of range: " + std::to_string(idx));
  return static_cast<int>(v);
}

SceneGeometry loadObj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  SceneGeometry geom;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag.empty() || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p.x >> p.y >> p.z)) throw std::runtime_error(path + ": bad vertex line");
      geom.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> ids;
      std::string tok;
      while (ss >> tok) {
        // "i", "i/j", "i/j/k", "i//k" all start with the position index
        long raw = std::strtol(tok.c_str(), nullptr, 10);
        ids.push_back(resolveObjIndex(raw, geom.vertices.size(), path));
      }
      if (ids.size() < 3) throw std::runtime_error(path + ": face with <3 vertices");
      for (size_t i = 2; i < ids.size(); ++i) {
        ScenePrimitive prim;
        prim.dim = 2;
        prim.v[0] = ids[0];
        prim.v[1] = ids[i - 1];
        prim.v[2] = ids[i];
        geom.primitives.push_back(prim);
      }
    } else if (tag == "l") {
      std::vector<int> ids;
      long raw;
      while (ss >> raw) ids.push_back(resolveObjIndex(raw, geom.vertices.size(), path));
      if (ids.size() < 2) throw std::runtime_error(path + ": polyline with <2 vertices");
      for (size_t i = 1; i < ids.size(); ++i) {
        ScenePrimitive prim;
        prim.dim = 1;
        prim.v[0] = ids[i - 1];
        prim.v[1] = ids[i];
        geom.primitives.push_back(prim);
      }
    } else if (tag == "p") {
      long raw;
      while (ss >> raw) {
        ScenePrimitive prim;
        prim.dim = 0;
        prim.v[0] = resolveObjIndex(raw, geom.vertices.size(), path);
        geom.primitives.push_back(prim);
      }
    }
    // Ignore vn/vt/usemtl/etc.
  }
  return geom;
}

struct PlyProperty {
  std::string name;
  std::string type;      // scalar type, or the value type for lists
  std::string countType; // non-empty for list properties
};

struct PlyElement {
  std::string name;
  size_t count = 0;
  std::vector<PlyProperty> props;
};

size_t plyTypeSize(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" || t == "float32")
    return 4;
  if (t == "double" || t == "float64" || t == "int64" || t == "uint64") return 8;
  throw std::runtime_error("unknown ply type " + t);
}

double plyReadBinaryScalar(std::istream& in, const std::string& t) {
  unsigned char buf[8];
  size_t n = plyTypeSize(t);
  in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("truncated ply payload");
  auto as = [&](auto v) {
    std::memcpy(&v, buf, sizeof v);
    return static_cast<double>(v);
  };
  if (t == "char" || t == "int8") return as(int8_t{});
  if (t == "uchar" || t == "uint8") return as(uint8_t{});
  if (t == "short" || t == "int16") return as(int16_t{});
  if (t == "ushort" || t == "uint16") return as(uint16_t{});
  if (t == "int" || t == "int32") return as(int32_t{});
  if (t == "uint" || t == "uint32") return as(uint32_t{});
  if (t == "float" || t == "float32") return as(float{});
  if (t == "double" || t == "float64") return as(double{});
  if (t == "int64") return as(int64_t{});
  if (t == "uint64") return as(uint64_t{});
  throw std::runtime_error("unknown ply type " + t);
}

SceneGeometry loadPly(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ply") throw std::runtime_error(path + ": missing ply magic");

  bool binary = false;
  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "comment" || tag == "obj_info") continue;
    if (tag == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else throw std::runtime_error(path + ": unsupported ply format " + fmt);
    } else if (tag == "element") {
      PlyElement el;
      ss >> el.name >> el.count;
      elements.push_back(el);
    } else if (tag == "property") {
      if (elements.empty()) throw std::runtime_error(path + ": property before element");
      PlyProperty prop;
      std::string t;
      ss >> t;
      if (t == "list") {
        ss >> prop.countType >> prop.type >> prop.name;
      } else {
        prop.type = t;
        ss >> prop.name;
      }
      elements.back().props.push_back(prop);
    } else if (tag == "end_header") {
      break;
    } else {
      throw std::runtime_error(path + ": unexpected header line: " + line);
    }
  }

  SceneGeometry geom;
  auto readScalar = [&](const std::string& type) -> double {
    if (binary) return plyReadBinaryScalar(in, type);
    double v;
    if (!(in >> v)) throw std::runtime_error(path + ": truncated ascii payload");
    return v;
  };

  for (const PlyElement& el : elements) {
    if (el.name == "vertex") {
      int xi = -1, yi = -1, zi = -1, nxi = -1, nyi = -1, nzi = -1;
      for (size_t i = 0; i < el.props.size(); ++i) {
        if (el.props[i].name == "x") xi = static_cast<int>(i);
        if (el.props[i].name == "y") yi = static_cast<int>(i);
        if (el.props[i].name == "z") zi = static_cast<int>(i);
        if (el.props[i].name == "nx") nxi = static_cast<int>(i);
        if (el.props[i].name == "ny") nyi = static_cast<int>(i);
        if (el.props[i].name == "nz") nzi = static_cast<int>(i);
      }
      if (xi < 0 || yi < 0 || zi < 0) throw std::runtime_error(path + ": vertex missing x/y/z");
      bool hasNormals = nxi >= 0 && nyi >= 0 && nzi >= 0;
      for (size_t v = 0; v < el.count; ++v) {
        Vec3 p, n;
        for (size_t i = 0; i < el.props.size(); ++i) {
          if (!el.props[i].countType.empty())
            throw std::runtime_error(path + ": list property on vertex element unsupported");
          double val = readScalar(el.props[i].type);
          if (static_cast<int>(i) == xi) p.x = val;
          if (static_cast<int>(i) == yi) p.y = val;
          if (static_cast<int>(i) == zi) p.z = val;
          if (static_cast<int>(i) == nxi) n.x = val;
          if (static_cast<int>(i) == nyi) n.y = val;
          if (static_cast<int>(i) == nzi) n.z = val;
        }
        geom.vertices.push_back(p);
        if (hasNormals) geom.normals.push_back(n);
      }
    } else if (el.name == "face" || el.name == "edge") {
      for (size_t f = 0; f < el.count; ++f) {
        std::vector<int> ids;
        for (const PlyProperty& prop : el.props) {
          if (!prop.countType.empty()) {
            size_t n = static_cast<size_t>(readScalar(prop.countType));
            for (size_t i = 0; i < n; ++i) {
              long raw = static_cast<long>(readScalar(prop.type));
              if (raw < 0 || raw >= static_cast<long>(geom.vertices.size()))
                throw std::runtime_error(path + ": face index out of range");
              ids.push_back(static_cast<int>(raw));
            }
          } else if (el.name == "edge" && (prop.name == "vertex1" || prop.name == "vertex2")) {
            ids.push_back(static_cast<int>(readScalar(prop.type)));
          } else {
            readScalar(prop.type);  // skip
          }
        }
        if (el.name == "edge") {
          if (ids.size() != 2) throw std::runtime_error(path + ": bad edge element");
          ScenePrimitive prim;
          prim.dim = 1;
          prim.v[0] = ids[0];
          prim.v[1] = ids[1];
          geom.primitives.push_back(prim);
        } else {
          if (ids.size() < 3) throw std::runtime_error(path + ": face with <3 vertices");
          for (size_t i = 2; i < ids.size(); ++i) {
            ScenePrimitive prim;
            prim.dim = 2;
            prim.v[0] = ids[0];
            prim.v[1] = ids[i - 1];
            prim.v[2] = ids[i];
            geom.primitives.push_back(prim);
          }
        }
      }
    } else {
      // Skip unknown element payload.
      for (size_t r = 0; r < el.count; ++r) {
        for (const PlyProperty& prop : el.props) {
          if (!prop.countType.empty()) {
            size_t n = static_cast<size_t>(readScalar(prop.countType));
            for (size_t i = 0; i < n; ++i) readScalar(prop.type);
          } else {
            readScalar(prop.type);
          }
        }
      }
    }
  }

  // A bare vertex cloud (no faces/edges) is treated as a point-cloud surface.
  if (geom.primitives.empty()) {
    geom.primitives.reserve(geom.vertices.size());
    for (size_t i = 0; i < geom.vertices.size(); ++i) {
      ScenePrimitive prim;
      prim.dim = 0;
      prim.v[0] = static_cast<int>(i);
      geom.primitives.push_back(prim);
    }
  }
  return geom;
}

}  // namespace

SceneGeometry loadSceneGeometry(const std::string& path) {
  std::string ext = lowerExt(path);
  if (ext == "obj") return loadObj(path);
  if (ext == "ply") return loadPly(path);
  throw std::runtime_error("unsupported mesh format: " + path);
}

void writeObj(const std::string& path, const SceneGeometry& geom) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  for (const Vec3& v : geom.vertices) out << "v " << v.x << " " << v.y << " " << v.z << "\n";
  for (const ScenePrimitive& p : geom.primitives) {
    if (p.dim == 2) out << "f " << p.v[0] + 1 << " " << p.v[1] + 1 << " " << p.v[2] + 1 << "\n";
    else if (p.dim == 1) out << "l " << p.v[0] + 1 << " " << p.v[1] + 1 << "\n";
    else out << "p " << p.v[0] + 1 << "\n";
  }
}

void writePointCloudPly(const std::string& path, const std::vector<Vec3>& points,
                        const std::vector<double>& scalar, const std::string& scalarName,
                        const std::vector<Vec3>& normals) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << points.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (!normals.empty()) out << "property double nx\nproperty double ny\nproperty double nz\n";
  if (!scalar.empty()) out << "property double " << scalarName << "\n";
  out << "end_header\n";
  for (size_t i = 0; i < points.size(); ++i) {
    out << points[i].x << " " << points[i].y << " " << points[i].z;
    if (!normals.empty())
      out << " " << normals[i].x << " " << normals[i].y << " " << normals[i].z;
    if (!scalar.empty()) out << " " << scalar[i];
    out << "\n";
  }
}

void writeMeshPly(const std::string& path, const SceneGeometry& geom,
                  const std::vector<double>& scalar, const std::string& scalarName,
                  const std::vector<Vec3>& color) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  size_t faceCount = 0, edgeCount = 0;
  for (const ScenePrimitive& p : geom.primitives) {
    if (p.dim == 2) ++faceCount;
    if (p.dim == 1) ++edgeCount;
  }
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << geom.vertices.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (!scalar.empty()) out << "property double " << scalarName << "\n";
  if (!color.empty()) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "element face " << faceCount << "\n";
  out << "property list uchar int vertex_indices\n";
  if (edgeCount > 0) {
    out << "element edge " << edgeCount << "\n";
    out << "property int vertex1\nproperty int vertex2\n";
  }
  out << "end_header\n";
  auto toByte = [](double v) { return static_cast<int>(clamp(v, 0.0, 1.0) * 255.0 + 0.5); };
  for (size_t i = 0; i < geom.vertices.size(); ++i) {
    const Vec3& v = geom.vertices[i];
    out << v.x << " " << v.y << " " << v.z;
    if (!scalar.empty()) out << " " << scalar[i];
    if (!color.empty())
      out << " " << toByte(color[i].x) << " " << toByte(color[i].y) << " " << toByte(color[i].z);
    out << "\n";
  }
  for (const ScenePrimitive& p : geom.primitives)
    if (p.dim == 2) out << "3 " << p.v[0] << " " << p.v[1] << " " << p.v[2] << "\n";
  for (const ScenePrimitive& p : geom.primitives)
    if (p.dim == 1) out << p.v[0] << " " << p.v[1] << "\n";
}

void writePpm(const std::string& path, int width, int height, const std::vector<Vec3>& rgb) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P6\n" << width << " " << height << "\n255\n";
  std::vector<unsigned char> row(static_cast<size_t>(width) * 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec3& c = rgb[static_cast<size_t>(y) * width + x];
      row[3 * x + 0] = static_cast<unsigned char>(clamp(c.x, 0.0, 1.0) * 255.0 + 0.5);
      row[3 * x + 1] = static_cast<unsigned char>(clamp(c.y, 0.0, 1.0) * 255.0 + 0.5);
      row[3 * x + 2] = static_cast<unsigned char>(clamp(c.z, 0.0, 1.0) * 255.0 + 0.5);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace pwos
