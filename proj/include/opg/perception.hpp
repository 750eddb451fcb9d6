#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "opg/errors.hpp"
#include "opg/geometry.hpp"
#include "opg/scene.hpp"

namespace opg {

constexpr int kBorderRadius = 10;

/// Fixed 8-color palette indexed by color_id. (0,0,0) is reserved for empty.
inline const std::array<std::array<uint8_t, 3>, kNumColors>& palette() {
  static const std::array<std::array<uint8_t, 3>, kNumColors> p = {{
      {220, 60, 60},    // red
      {60, 200, 80},    // green
      {70, 110, 230},   // blue
      {230, 210, 70},   // yellow
      {200, 80, 200},   // magenta
      {80, 200, 210},   // cyan
      {240, 150, 60},   // orange
      {140, 90, 220},   // purple
  }};
  return p;
}

/// The MDP state (I, D, A): color of the topmost object per cell, count of
/// covering objects per cell, and the target's full (amodal) footprint.
struct HeightmapStack {
  int w = 0, h = 0;
  std::vector<uint8_t> color;   // w*h*3, rgb
  std::vector<uint8_t> depth;   // w*h, covering-object count
  std::vector<uint8_t> amodal;  // w*h, 0/1
};

inline HeightmapStack render(const Scene& scene, int target_id) {
  const SceneObject* target = scene.find(target_id);
  if (!target) throw SimError("render: dead target id " + std::to_string(target_id));

  HeightmapStack s;
  s.w = scene.width;
  s.h = scene.height;
  s.color.assign(static_cast<size_t>(s.w) * s.h * 3, 0);
  s.depth.assign(static_cast<size_t>(s.w) * s.h, 0);
  s.amodal.assign(static_cast<size_t>(s.w) * s.h, 0);

  // Painter's pass bottom-to-top: depth accumulates, color is overwritten.
  for (int id : scene.stack_order) {
    const SceneObject* obj = scene.find(id);
    Mask fp = object_footprint(scene, *obj);
    const auto& rgb = palette()[obj->spec.color_id % kNumColors];
    for (int y = 0; y < s.h; ++y) {
      for (int x = 0; x < s.w; ++x) {
        if (!fp.test(x, y)) continue;
        size_t c = static_cast<size_t>(y) * s.w + x;
        s.depth[c] = static_cast<uint8_t>(std::min(255, s.depth[c] + 1));
        s.color[c * 3 + 0] = rgb[0];
        s.color[c * 3 + 1] = rgb[1];
        s.color[c * 3 + 2] = rgb[2];
      }
    }
  }

  Mask full = object_footprint(scene, *target);
  for (int y = 0; y < s.h; ++y)
    for (int x = 0; x < s.w; ++x)
      if (full.test(x, y)) s.amodal[static_cast<size_t>(y) * s.w + x] = 1;
  return s;
}

/// All occlusion quantities the policy and coordinator consume.
/// o    — occluded fraction of the target's full mask
/// m_b  — border strip: Chebyshev dilation of the full mask minus the mask
/// o_b  — border cells covered by blockers; t_b = |m_b|; t_m = |full|
/// a_b = o_b/t_b, a_n = o_b/t_m
struct OcclusionReport {
  Mask full_mask;
  Mask visible_mask;
  double o = 0.0;
  int o_b = 0;
  int t_b = 0;
  int t_m = 0;
  double a_b = 0.0;
  double a_n = 0.0;
};

/// `border_any_overlap` widens the border-cover test from "objects above the
/// target" to "any other object".
inline OcclusionReport occlusion_report(const Scene& scene, int target_id,
                                        int border_radius = kBorderRadius,
                                        bool border_any_overlap = false) {
  const SceneObject* target = scene.find(target_id);
  if (!target) throw SimError("occlusion_report: dead target id " + std::to_string(target_id));

  OcclusionReport r;
  r.full_mask = object_footprint(scene, *target);
  r.t_m = r.full_mask.count();

  Mask above(scene.width, scene.height);
  Mask others(scene.width, scene.height);
  bool past = false;
  for (int id : scene.stack_order) {
    if (id == target_id) {
      past = true;
      continue;
    }
    Mask fp = object_footprint(scene, id);
    if (past) above |= fp;
    others |= fp;
  }

  r.visible_mask = r.full_mask.minus(above);
  const int occluded = r.t_m - r.visible_mask.count();
  r.o = static_cast<double>(occluded) / static_cast<double>(r.t_m);

  Mask border = chebyshev_dilate(r.full_mask, border_radius).minus(r.full_mask);
  r.t_b = border.count();
  const Mask& blockers = border_any_overlap ? others : above;
  r.o_b = border.intersection_count(blockers);
  r.a_b = r.t_b > 0 ? static_cast<double>(r.o_b) / static_cast<double>(r.t_b) : 0.0;
  r.a_n = static_cast<double>(r.o_b) / static_cast<double>(r.t_m);
  return r;
}

/// Argmax of the occluded rate over the candidates; ties go to the lowest id.
inline int most_occluded_target(const Scene& scene, std::vector<int> candidate_ids,
                                int border_radius = kBorderRadius) {
  if (candidate_ids.empty()) throw SimError("most_occluded_target: empty candidate set");
  std::sort(candidate_ids.begin(), candidate_ids.end());
  int best_id = -1;
  double best_o = -1.0;
  for (int id : candidate_ids) {
    double o = occlusion_report(scene, id, border_radius).o;
    if (o > best_o) {
      best_o = o;
      best_id = id;
    }
  }
  return best_id;
}

// ---- raster dumps -------------------------------------------------------

inline void write_ppm(const std::string& path, int w, int h, const std::vector<uint8_t>& rgb) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SimError("write_ppm: cannot open " + path);
  f << "P6\n" << w << " " << h << "\n255\n";
  f.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

inline void write_pgm(const std::string& path, int w, int h, const std::vector<uint8_t>& gray) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SimError("write_pgm: cannot open " + path);
  f << "P5\n" << w << " " << h << "\n255\n";
  f.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
}

/// Writes `<prefix>_color.ppm`, `<prefix>_depth.pgm`, `<prefix>_amodal.pgm`.
inline void dump_heightmaps(const HeightmapStack& s, const std::string& dir,
                            const std::string& prefix) {
  write_ppm(dir + "/" + prefix + "_color.ppm", s.w, s.h, s.color);
  std::vector<uint8_t> depth_vis(s.depth.size());
  for (size_t i = 0; i < s.depth.size(); ++i)
    depth_vis[i] = static_cast<uint8_t>(std::min(255, s.depth[i] * 32));
  write_pgm(dir + "/" + prefix + "_depth.pgm", s.w, s.h, depth_vis);
  std::vector<uint8_t> amodal_vis(s.amodal.size());
  for (size_t i = 0; i < s.amodal.size(); ++i) amodal_vis[i] = s.amodal[i] ? 255 : 0;
  write_pgm(dir + "/" + prefix + "_amodal.pgm", s.w, s.h, amodal_vis);
}

}  // namespace opg
