#pragma once

// Synthetic scenes for tests: textured objects on a textured background with
// linear motion and staggered entry/exit, plus exact ground truth.

#include <climits>
#include <cmath>
#include <vector>

#include "emo/core.hpp"
#include "emo/metrics.hpp"
#include "emo/sequence_io.hpp"

namespace emo::testing {

struct SceneObject {
  int id = 1;
  double x0 = 0, y0 = 0;  // top-left at entry frame
  double vx = 0, vy = 0;  // pixels per frame
  double w = 24, h = 48;
  int entry_frame = 1;
  int exit_frame = INT_MAX;  // last frame the object is present
};

struct Scene {
  int width = 320;
  int height = 240;
  double fps = 25.0;
  std::vector<SceneObject> objects;
};

inline BoundingBox object_box(const SceneObject& o, int frame) {
  const double t = frame - o.entry_frame;
  return {o.x0 + o.vx * t, o.y0 + o.vy * t, o.w, o.h};
}

inline bool object_present(const SceneObject& o, int frame, const Scene& s) {
  if (frame < o.entry_frame || frame > o.exit_frame) return false;
  const BoundingBox b = object_box(o, frame);
  return b.left >= 0 && b.top >= 0 && b.right() <= s.width && b.bottom() <= s.height;
}

inline GroundTruth scene_ground_truth(const Scene& s, int n_frames) {
  GroundTruth gt;
  for (int f = 1; f <= n_frames; ++f)
    for (const auto& o : s.objects)
      if (object_present(o, f, s)) gt[f].push_back({o.id, object_box(o, f), 1, 1.0});
  return gt;
}

// Smooth textures so small localization errors keep NCC high: a low-frequency
// background and a per-object pattern anchored to the object's own origin
// (the texture travels with the object).
inline GrayImage render_frame(const Scene& s, int frame) {
  GrayImage img(s.width, s.height);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x)
      img.at(x, y) = float(60.0 + 25.0 * std::sin(0.03 * x) * std::cos(0.025 * y));
  for (const auto& o : s.objects) {
    if (!object_present(o, frame, s)) continue;
    const BoundingBox b = object_box(o, frame);
    const int x0 = (int)std::lround(b.left), y0 = (int)std::lround(b.top);
    const int x1 = (int)std::lround(b.right()), y1 = (int)std::lround(b.bottom());
    const double phase = 1.7 * o.id;
    for (int y = std::max(0, y0); y < std::min(s.height, y1); ++y)
      for (int x = std::max(0, x0); x < std::min(s.width, x1); ++x) {
        const double u = x - b.left, v = y - b.top;
        img.at(x, y) =
            float(160.0 + 70.0 * std::sin(0.25 * u + phase) * std::cos(0.18 * v + 0.5 * phase));
      }
  }
  return img;
}

inline std::vector<GrayImage> render_frames(const Scene& s, int n_frames) {
  std::vector<GrayImage> out;
  out.reserve(n_frames);
  for (int f = 1; f <= n_frames; ++f) out.push_back(render_frame(s, f));
  return out;
}

}  // namespace emo::testing
