#pragma once

#include <algorithm>
#include <cmath>

#include "emo/core.hpp"

namespace emo {

// Bilinear resample to (out_w, out_h), pixel centers aligned, edges clamped.
inline GrayImage resize_bilinear(const GrayImage& src, int out_w, int out_h) {
  if (src.empty() || out_w <= 0 || out_h <= 0) throw EmptyCrop();
  if (src.width == out_w && src.height == out_h) return src;
  GrayImage dst(out_w, out_h);
  const double sx = double(src.width) / out_w;
  const double sy = double(src.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = (int)std::floor(fy);
    double wy = fy - y0;
    int y0c = std::clamp(y0, 0, src.height - 1);
    int y1c = std::clamp(y0 + 1, 0, src.height - 1);
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = (int)std::floor(fx);
      double wx = fx - x0;
      int x0c = std::clamp(x0, 0, src.width - 1);
      int x1c = std::clamp(x0 + 1, 0, src.width - 1);
      double top = src.at(x0c, y0c) * (1 - wx) + src.at(x1c, y0c) * wx;
      double bot = src.at(x0c, y1c) * (1 - wx) + src.at(x1c, y1c) * wx;
      dst.at(x, y) = float(top * (1 - wy) + bot * wy);
    }
  }
  return dst;
}

}  // namespace emo
