#include "artic/shape.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "artic/error.hpp"
#include "artic/jsonw.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace artic {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vec3 parse_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorKind::kParse, what + ": expected a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

GroundTruthArticulation parse_gt(const json& j, int part_id) {
  GroundTruthArticulation gt;
  gt.part_id = part_id;
  gt.m_rev = j.value("m_rev", 0) != 0;
  gt.m_pri = j.value("m_pri", 0) != 0;
  const bool movable = gt.m_rev || gt.m_pri;
  if (j.contains("axis")) {
    gt.axis = Dir3::normalized(parse_vec3(j["axis"], "gt.axis"));
  }
  if (j.contains("pivot")) {
    gt.pivot = parse_vec3(j["pivot"], "gt.pivot");
  }
  if (movable && !gt.axis) {
    throw Error(ErrorKind::kValidation,
                "part " + std::to_string(part_id) + ": movable ground truth without axis");
  }
  if (!movable && gt.axis) {
    throw Error(ErrorKind::kValidation,
                "part " + std::to_string(part_id) + ": fixed ground truth with axis");
  }
  if (gt.m_rev && !gt.pivot) {
    throw Error(ErrorKind::kValidation,
                "part " + std::to_string(part_id) + ": revolute ground truth without pivot");
  }
  if (j.contains("range_rev_deg")) {
    const json& r = j["range_rev_deg"];
    gt.range_rev_deg = {{r[0].get<double>(), r[1].get<double>()}};
  }
  if (j.contains("range_pri")) {
    const json& r = j["range_pri"];
    gt.range_pri = {{r[0].get<double>(), r[1].get<double>()}};
  }
  return gt;
}

}  // namespace

TriMesh load_obj(const std::string& path, std::vector<std::string>* warnings) {
  const std::string text = read_file(path);
  TriMesh mesh;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::kParse, path + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x >> v.y >> v.z)) fail("malformed vertex record");
      if (!is_finite(v)) fail("non-finite vertex");
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::array<int, 3> idx{};
      std::string tok;
      int n = 0;
      while (ls >> tok) {
        if (n >= 3) fail("face with more than 3 indices (mesh must be triangulated)");
        // Accept v, v/vt, v//vn, v/vt/vn forms; only the position index is used.
        const size_t slash = tok.find('/');
        const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
        int value = 0;
        const auto res = std::from_chars(head.data(), head.data() + head.size(), value);
        if (res.ec != std::errc() || res.ptr != head.data() + head.size()) {
          fail("malformed face index '" + tok + "'");
        }
        if (value <= 0) fail("face indices must be positive 1-based");
        idx[n++] = value - 1;
      }
      if (n != 3) fail("face with fewer than 3 indices");
      mesh.triangles.push_back(idx);
    } else {
      if (warnings) {
        warnings->push_back(path + ":" + std::to_string(line_no) + ": ignored '" + tag +
                            "' record");
      }
    }
  }
  return mesh;
}

void save_obj(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write file: " + path);
  for (const Vec3& v : mesh.vertices) {
    out << "v " << fmt_g17(v.x) << ' ' << fmt_g17(v.y) << ' ' << fmt_g17(v.z) << '\n';
  }
  for (const auto& t : mesh.triangles) {
    out << "f " << (t[0] + 1) << ' ' << (t[1] + 1) << ' ' << (t[2] + 1) << '\n';
  }
}

Shape load_shape(const std::string& directory, std::vector<std::string>* warnings) {
  const fs::path dir(directory);
  const fs::path manifest_path = dir / "shape.json";
  if (!fs::exists(manifest_path)) {
    throw Error(ErrorKind::kNotFound, "missing manifest: " + manifest_path.string());
  }
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path.string()));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, manifest_path.string() + ": " + e.what());
  }

  Shape shape;
  try {
    shape.id = manifest.at("id").get<std::string>();
    shape.up_axis = manifest.value("up_axis", std::string("y"));
    for (const json& jp : manifest.at("parts")) {
      Part part;
      part.id = jp.at("id").get<int>();
      part.mesh_file = jp.at("mesh").get<std::string>();
      if (jp.contains("label")) part.label = jp["label"].get<std::string>();
      const fs::path mesh_path = dir / part.mesh_file;
      if (!fs::exists(mesh_path)) {
        throw Error(ErrorKind::kNotFound, "missing mesh file: " + mesh_path.string());
      }
      part.mesh = load_obj(mesh_path.string(), warnings);
      try {
        part.degenerate_triangles = validate_mesh(part.mesh);
      } catch (const Error& e) {
        throw Error(e.kind(),
                    "part " + std::to_string(part.id) + " (" + part.mesh_file + "): " + e.what());
      }
      if (jp.contains("gt")) part.gt = parse_gt(jp["gt"], part.id);
      shape.parts.push_back(std::move(part));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, manifest_path.string() + ": " + e.what());
  }
  if (shape.parts.empty()) {
    throw Error(ErrorKind::kValidation, manifest_path.string() + ": shape has no parts");
  }
  return shape;
}

void save_shape(const Shape& shape, const std::string& directory) {
  const fs::path dir(directory);
  fs::create_directories(dir);

  JsonWriter w;
  w.begin_object();
  w.kv("id", shape.id);
  w.kv("up_axis", shape.up_axis);
  w.key("normalization").begin_object();
  w.kv("scale", shape.normalization.scale);
  w.key("offset").vec3(shape.normalization.offset.x, shape.normalization.offset.y,
                       shape.normalization.offset.z);
  w.end_object();
  w.key("parts").begin_array();
  for (const Part& part : shape.parts) {
    w.begin_object();
    w.kv("id", part.id);
    const std::string mesh_file =
        part.mesh_file.empty()
            ? ("part_" + std::string(part.id < 10 ? "00" : part.id < 100 ? "0" : "") +
               std::to_string(part.id) + ".obj")
            : part.mesh_file;
    w.kv("mesh", mesh_file);
    if (part.label) w.kv("label", *part.label);
    if (part.gt) {
      const GroundTruthArticulation& gt = *part.gt;
      w.key("gt").begin_object();
      w.kv("m_rev", gt.m_rev ? 1 : 0);
      w.kv("m_pri", gt.m_pri ? 1 : 0);
      if (gt.axis) w.key("axis").vec3(gt.axis->x(), gt.axis->y(), gt.axis->z());
      if (gt.pivot) w.key("pivot").vec3(gt.pivot->x, gt.pivot->y, gt.pivot->z);
      if (gt.range_rev_deg) {
        w.key("range_rev_deg").begin_array();
        w.value((*gt.range_rev_deg)[0]).value((*gt.range_rev_deg)[1]);
        w.end_array();
      }
      if (gt.range_pri) {
        w.key("range_pri").begin_array();
        w.value((*gt.range_pri)[0]).value((*gt.range_pri)[1]);
        w.end_array();
      }
      w.end_object();
    }
    w.end_object();
    save_obj(part.mesh, (dir / mesh_file).string());
  }
  w.end_array();
  w.end_object();

  std::ofstream out(dir / "shape.json", std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write manifest in " + directory);
  out << w.str() << '\n';
}

void prepare_shape(Shape& shape, int sample_count, uint64_t seed) {
  for (Part& part : shape.parts) {
    part.degenerate_triangles = validate_mesh(part.mesh);
    part.samples = sample_surface(part.mesh, sample_count,
                                  mix_seed(seed, static_cast<uint64_t>(part.id)));
    part.obb = obb_of(part.samples, pca_axes(part.samples));
    part.aabb = aabb_of(part.samples);
  }
}

void normalize_shape(Shape& shape) {
  for (const Part& part : shape.parts) {
    if (!part.prepared()) {
      throw Error(ErrorKind::kInvalidInput, "normalize_shape: shape is not prepared");
    }
  }
  Aabb bounds = Aabb::empty();
  for (const Part& part : shape.parts) bounds.expand(mesh_aabb(part.mesh));
  const double longest = bounds.longest_side();
  if (!(longest > 0.0)) {
    throw Error(ErrorKind::kDegenerateInput, "normalize_shape: shape has zero extent");
  }
  const double scale = 1.0 / longest;

  Vec3 centroid{0, 0, 0};
  size_t n = 0;
  for (const Part& part : shape.parts) {
    for (const Vec3& s : part.samples) {
      centroid += s * scale;
      ++n;
    }
  }
  centroid = centroid / static_cast<double>(n);
  const Vec3 offset = -centroid;

  auto map_point = [&](const Vec3& p) { return p * scale + offset; };

  for (Part& part : shape.parts) {
    for (Vec3& v : part.mesh.vertices) v = map_point(v);
    for (Vec3& s : part.samples) s = map_point(s);
    part.obb = obb_of(part.samples, pca_axes(part.samples));
    part.aabb = aabb_of(part.samples);
    if (part.gt) {
      if (part.gt->pivot) part.gt->pivot = map_point(*part.gt->pivot);
      if (part.gt->range_pri) {
        (*part.gt->range_pri)[0] *= scale;
        (*part.gt->range_pri)[1] *= scale;
      }
    }
  }
  // Composition with any prior normalization, so the recorded transform always
  // maps raw input coordinates to the current frame.
  shape.normalization.offset = shape.normalization.offset * scale + offset;
  shape.normalization.scale *= scale;
}

}  // namespace artic
