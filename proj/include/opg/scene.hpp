#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "opg/errors.hpp"
#include "opg/geometry.hpp"

namespace opg {

constexpr int kNumRotations = 16;
constexpr int kDefaultWorkspace = 64;
constexpr int kNumColors = 8;

// Motion primitive geometry (grid cells). The paper leaves these to the
// physics backend; they are fixed constants here so outcomes reproduce.
constexpr double kPushLength = 10.0;
constexpr double kPushHalfWidth = 2.0;
constexpr double kFingerOffset = 4.0;
constexpr double kFingerHalfLength = 3.0;
constexpr double kFingerHalfWidth = 1.0;
// A grasp fails when more than this fraction of the grasped object is
// covered by objects above it.
constexpr int kCoverageNum = 1;  // 1/10
constexpr int kCoverageDen = 10;

inline double rotation_angle(int rot_index) {
  return static_cast<double>(rot_index) * (M_PI / 8.0);  // 22.5 degree step
}

struct ObjectSpec {
  int id = -1;
  int color_id = 0;
  Polygon shape;  // object frame
};

struct Pose {
  float x = 0.0f;
  float y = 0.0f;
  float theta = 0.0f;  // [0, 2*pi)
};

struct SceneObject {
  ObjectSpec spec;
  Pose pose;
};

enum class MotionKind { Push = 0, Grasp = 1 };

inline const char* motion_kind_name(MotionKind k) {
  return k == MotionKind::Push ? "push" : "grasp";
}

struct MotionPrimitive {
  MotionKind kind = MotionKind::Push;
  int x = 0;
  int y = 0;
  int rot_index = 0;  // angle = rot_index * 22.5 degrees
};

struct PushOutcome {
  std::vector<int> moved_ids;  // ascending
};

struct GraspOutcome {
  int grasped_id = -1;  // -1: nothing left the scene
  bool success = false;
  bool target_was_grasped = false;
};

struct Scene {
  int width = kDefaultWorkspace;
  int height = kDefaultWorkspace;
  uint64_t seed = 0;
  std::vector<SceneObject> objects;  // spawn order
  std::vector<int> stack_order;      // ids, later = above
  int next_id = 0;

  const SceneObject* find(int id) const {
    for (const auto& o : objects)
      if (o.spec.id == id) return &o;
    return nullptr;
  }
  SceneObject* find(int id) {
    for (auto& o : objects)
      if (o.spec.id == id) return &o;
    return nullptr;
  }
  bool is_live(int id) const { return find(id) != nullptr; }

  int stack_index(int id) const {
    for (size_t i = 0; i < stack_order.size(); ++i)
      if (stack_order[i] == id) return static_cast<int>(i);
    return -1;
  }
};

inline void validate_object_shape(const Polygon& shape) {
  if (shape.size() < 3 || shape.size() > 12)
    throw SimError("object shape must have 3..12 vertices");
  if (!polygon_is_simple(shape)) throw SimError("object shape must be a simple polygon");
  if (polygon_area(shape) < 4.0) throw SimError("object shape area must be >= 4 grid cells");
}

inline Polygon object_world_polygon(const SceneObject& obj) {
  return transform_polygon(obj.spec.shape, obj.pose.x, obj.pose.y, obj.pose.theta);
}

inline Mask object_footprint(const Scene& scene, const SceneObject& obj) {
  return rasterize_polygon(object_world_polygon(obj), scene.width, scene.height);
}

inline Mask object_footprint(const Scene& scene, int id) {
  const SceneObject* obj = scene.find(id);
  if (!obj) throw SimError("footprint of dead object id " + std::to_string(id));
  return object_footprint(scene, *obj);
}

namespace detail {

inline std::vector<Mask> all_footprints(const Scene& scene) {
  std::vector<Mask> fps;
  fps.reserve(scene.objects.size());
  for (const auto& o : scene.objects) fps.push_back(object_footprint(scene, o));
  return fps;
}

inline int object_index(const Scene& scene, int id) {
  for (size_t i = 0; i < scene.objects.size(); ++i)
    if (scene.objects[i].spec.id == id) return static_cast<int>(i);
  return -1;
}

/// Shifts the pose minimally so the polygon's bbox fits [0,w]x[0,h].
inline void clamp_pose(const Polygon& shape, Pose& pose, int w, int h) {
  Box b = polygon_bbox(transform_polygon(shape, pose.x, pose.y, pose.theta));
  double dx = 0, dy = 0;
  if (b.min_x < 0) dx = -b.min_x;
  if (b.max_x + dx > w) dx = w - b.max_x;
  if (b.min_y < 0) dy = -b.min_y;
  if (b.max_y + dy > h) dy = h - b.max_y;
  pose.x = static_cast<float>(pose.x + dx);
  pose.y = static_cast<float>(pose.y + dy);
}

}  // namespace detail

inline std::vector<Polygon> default_shape_pool() {
  auto rect = [](float hx, float hy) {
    return Polygon{{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}};
  };
  std::vector<Polygon> pool;
  pool.push_back(rect(1.5f, 1.5f));  // 3x3 square
  pool.push_back(rect(2.0f, 2.0f));  // 4x4 square
  pool.push_back(rect(2.5f, 2.5f));  // 5x5 square
  pool.push_back(rect(1.5f, 3.0f));  // 3x6 slab
  pool.push_back(rect(1.0f, 4.0f));  // 2x8 bar
  // L piece
  pool.push_back({{-2.5f, -2.5f}, {2.5f, -2.5f}, {2.5f, -0.5f}, {-0.5f, -0.5f},
                  {-0.5f, 2.5f}, {-2.5f, 2.5f}});
  // right triangle
  pool.push_back({{-2.5f, -2.5f}, {2.5f, -2.5f}, {-2.5f, 2.5f}});
  // hexagon, diameter 5
  pool.push_back({{2.5f, 0.0f}, {1.25f, 2.2f}, {-1.25f, 2.2f}, {-2.5f, 0.0f},
                  {-1.25f, -2.2f}, {1.25f, -2.2f}});
  return pool;
}

/// Drops n objects at uniformly random in-bounds poses. Each new object is
/// appended last in stack_order, i.e. above everything it overlaps.
inline Scene spawn_random(Scene scene, int n_objects, const std::vector<Polygon>& shape_pool,
                          std::mt19937_64& rng) {
  if (n_objects < 1) throw SimError("spawn_random: n_objects must be >= 1");
  if (shape_pool.empty()) throw SimError("spawn_random: empty shape pool");
  for (const auto& s : shape_pool) validate_object_shape(s);

  for (int i = 0; i < n_objects; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      int shape_idx = std::uniform_int_distribution<int>(
          0, static_cast<int>(shape_pool.size()) - 1)(rng);
      int color = std::uniform_int_distribution<int>(0, kNumColors - 1)(rng);
      Pose pose;
      pose.x = std::uniform_real_distribution<float>(0.0f, static_cast<float>(scene.width))(rng);
      pose.y = std::uniform_real_distribution<float>(0.0f, static_cast<float>(scene.height))(rng);
      pose.theta = std::uniform_real_distribution<float>(0.0f, static_cast<float>(2.0 * M_PI))(rng);
      if (pose.theta >= static_cast<float>(2.0 * M_PI)) pose.theta = 0.0f;

      Polygon world = transform_polygon(shape_pool[shape_idx], pose.x, pose.y, pose.theta);
      Box b = polygon_bbox(world);
      if (b.min_x < 0 || b.min_y < 0 || b.max_x > scene.width || b.max_y > scene.height) continue;
      if (rasterize_polygon(world, scene.width, scene.height).empty()) continue;

      SceneObject obj;
      obj.spec.id = scene.next_id++;
      obj.spec.color_id = color;
      obj.spec.shape = shape_pool[shape_idx];
      obj.pose = pose;
      scene.objects.push_back(std::move(obj));
      scene.stack_order.push_back(scene.objects.back().spec.id);
      placed = true;
    }
    if (!placed) throw SceneFullError("spawn_random: placement failed after 1000 samples");
  }
  return scene;
}

/// Straight stroke: every object whose footprint meets the swept corridor is
/// translated by the full push vector, then clamped into the workspace.
/// Stack order never changes.
inline std::pair<Scene, PushOutcome> apply_push(Scene scene, const MotionPrimitive& prim) {
  if (prim.kind != MotionKind::Push) throw SimError("apply_push: primitive is not a push");
  const double angle = rotation_angle(prim.rot_index);
  const double sx = prim.x + 0.5, sy = prim.y + 0.5;
  Mask corridor = rasterize_polygon(
      oriented_rect(sx, sy, kPushLength, kPushHalfWidth, angle), scene.width, scene.height);

  PushOutcome out;
  std::vector<int> moved_idx;
  auto fps = detail::all_footprints(scene);
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    if (fps[i].intersects(corridor)) {
      moved_idx.push_back(static_cast<int>(i));
      out.moved_ids.push_back(scene.objects[i].spec.id);
    }
  }
  std::sort(out.moved_ids.begin(), out.moved_ids.end());

  const float dx = static_cast<float>(kPushLength * std::cos(angle));
  const float dy = static_cast<float>(kPushLength * std::sin(angle));
  for (int i : moved_idx) {
    SceneObject& obj = scene.objects[i];
    obj.pose.x += dx;
    obj.pose.y += dy;
    detail::clamp_pose(obj.spec.shape, obj.pose, scene.width, scene.height);
  }
  return {std::move(scene), std::move(out)};
}

/// Parallel-jaw grasp at cell (x, y), jaws closing across the stroke axis.
/// Succeeds iff an object is topmost at the cell, both finger rectangles are
/// clear of every footprint, and at most 1/10 of the object is covered from
/// above. On success the object is removed.
inline std::pair<Scene, GraspOutcome> apply_grasp(Scene scene, const MotionPrimitive& prim,
                                                  int target_id) {
  if (prim.kind != MotionKind::Grasp) throw SimError("apply_grasp: primitive is not a grasp");
  if (!scene.is_live(target_id)) throw SimError("apply_grasp: dead target id");
  if (prim.x < 0 || prim.y < 0 || prim.x >= scene.width || prim.y >= scene.height)
    throw SimError("apply_grasp: grasp cell outside workspace");

  GraspOutcome out;
  auto fps = detail::all_footprints(scene);

  int grasped_idx = -1;
  for (int s = static_cast<int>(scene.stack_order.size()) - 1; s >= 0; --s) {
    int idx = detail::object_index(scene, scene.stack_order[s]);
    if (fps[idx].test(prim.x, prim.y)) {
      grasped_idx = idx;
      break;
    }
  }
  if (grasped_idx < 0) return {std::move(scene), out};

  const double angle = rotation_angle(prim.rot_index);
  const double cx = prim.x + 0.5, cy = prim.y + 0.5;
  const double px = -std::sin(angle), py = std::cos(angle);  // jaw axis
  Mask fingers(scene.width, scene.height);
  for (int side : {-1, 1}) {
    Polygon rect = oriented_rect(cx + side * kFingerOffset * px, cy + side * kFingerOffset * py,
                                 kFingerHalfLength, kFingerHalfWidth, angle, kFingerHalfLength);
    fingers |= rasterize_polygon(rect, scene.width, scene.height);
  }
  for (const auto& fp : fps)
    if (fingers.intersects(fp)) return {std::move(scene), out};

  const int gid = scene.objects[grasped_idx].spec.id;
  Mask above(scene.width, scene.height);
  bool past = false;
  for (int id : scene.stack_order) {
    if (past) above |= fps[detail::object_index(scene, id)];
    if (id == gid) past = true;
  }
  const int total = fps[grasped_idx].count();
  const int covered = fps[grasped_idx].intersection_count(above);
  if (covered * kCoverageDen > total * kCoverageNum) return {std::move(scene), out};

  out.grasped_id = gid;
  out.success = true;
  out.target_was_grasped = (gid == target_id);
  scene.objects.erase(scene.objects.begin() + grasped_idx);
  scene.stack_order.erase(std::find(scene.stack_order.begin(), scene.stack_order.end(), gid));
  return {std::move(scene), out};
}

// ---- JSON serialization -----------------------------------------------
// {workspace:[W,H], objects:[{id, color_id, vertices:[[x,y]...],
//  pose:[x,y,theta]}...], stack_order:[ids], seed}

inline nlohmann::ordered_json scene_to_json(const Scene& scene) {
  nlohmann::ordered_json j;
  j["workspace"] = {scene.width, scene.height};
  j["objects"] = nlohmann::ordered_json::array();
  for (const auto& o : scene.objects) {
    nlohmann::ordered_json jo;
    jo["id"] = o.spec.id;
    jo["color_id"] = o.spec.color_id;
    auto verts = nlohmann::ordered_json::array();
    for (const auto& v : o.spec.shape) verts.push_back({v.x, v.y});
    jo["vertices"] = verts;
    jo["pose"] = {o.pose.x, o.pose.y, o.pose.theta};
    j["objects"].push_back(jo);
  }
  j["stack_order"] = scene.stack_order;
  j["seed"] = scene.seed;
  return j;
}

inline Scene scene_from_json(const nlohmann::json& j) {
  Scene s;
  try {
    s.width = j.at("workspace").at(0).get<int>();
    s.height = j.at("workspace").at(1).get<int>();
    s.seed = j.at("seed").get<uint64_t>();
    for (const auto& jo : j.at("objects")) {
      SceneObject o;
      o.spec.id = jo.at("id").get<int>();
      o.spec.color_id = jo.at("color_id").get<int>();
      for (const auto& v : jo.at("vertices"))
        o.spec.shape.push_back({v.at(0).get<float>(), v.at(1).get<float>()});
      o.pose.x = jo.at("pose").at(0).get<float>();
      o.pose.y = jo.at("pose").at(1).get<float>();
      o.pose.theta = jo.at("pose").at(2).get<float>();
      s.objects.push_back(std::move(o));
    }
    s.stack_order = j.at("stack_order").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw SimError(std::string("scene JSON: ") + e.what());
  }
  if (s.width < 1 || s.height < 1) throw SimError("scene JSON: bad workspace");
  // stack_order must be a bijection over live ids
  if (s.stack_order.size() != s.objects.size())
    throw SimError("scene JSON: stack_order size mismatch");
  int max_id = -1;
  for (const auto& o : s.objects) {
    validate_object_shape(o.spec.shape);
    if (s.stack_index(o.spec.id) < 0)
      throw SimError("scene JSON: object id missing from stack_order");
    max_id = std::max(max_id, o.spec.id);
  }
  std::vector<int> sorted = s.stack_order;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw SimError("scene JSON: duplicate id in stack_order");
  s.next_id = max_id + 1;
  return s;
}

}  // namespace opg
