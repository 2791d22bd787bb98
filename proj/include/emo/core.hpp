#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace emo {

// ---------------------------------------------------------------------------
// Errors

struct EmoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyCrop : EmoError {
  EmptyCrop() : EmoError("crop region has zero area") {}
};

struct DegenerateBox : EmoError {
  DegenerateBox() : EmoError("bounding box has zero area") {}
};

struct DecodeError : EmoError {
  explicit DecodeError(const std::string& what) : EmoError("decode error: " + what) {}
};

struct MalformedLine : EmoError {
  int line_number;  // 1-based
  MalformedLine(int line, const std::string& what)
      : EmoError("line " + std::to_string(line) + ": " + what), line_number(line) {}
};

struct MissingSeqInfo : EmoError {
  explicit MissingSeqInfo(const std::string& path) : EmoError("missing seqinfo.ini under " + path) {}
};

struct MissingFrameFile : EmoError {
  explicit MissingFrameFile(const std::string& path) : EmoError("missing frame file " + path) {}
};

struct NoGroundTruth : EmoError {
  NoGroundTruth() : EmoError("sequence has no ground truth") {}
};

// ---------------------------------------------------------------------------
// Geometry

// Axis-aligned box, MOTChallenge native top-left + size form, pixel units.
struct BoundingBox {
  double left = 0;
  double top = 0;
  double width = 0;
  double height = 0;

  double right() const { return left + width; }
  double bottom() const { return top + height; }
  double area() const { return width * height; }
  double center_x() const { return left + width / 2.0; }
  double center_y() const { return top + height / 2.0; }

  bool valid() const {
    return width >= 0 && height >= 0 && std::isfinite(left) && std::isfinite(top) &&
           std::isfinite(width) && std::isfinite(height);
  }
};

inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.right(), b.right()) - std::max(a.left, b.left);
  const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
  if (ix <= 0 || iy <= 0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return inter / uni;
}

struct Detection {
  BoundingBox box;
  double confidence = 1.0;  // in [0,1]
  int frame_index = 0;      // 1-based
};

// ---------------------------------------------------------------------------
// Images

// Row-major luminance image, values in [0,255].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  GrayImage() = default;
  GrayImage(int w, int h, float fill = 0.f) : width(w), height(h), data(size_t(w) * h, fill) {}

  float& at(int x, int y) { return data[size_t(y) * width + x]; }
  float at(int x, int y) const { return data[size_t(y) * width + x]; }
  bool empty() const { return width <= 0 || height <= 0; }
};

// BT.601 luma weights; the fixed grayscale convention for this project.
inline float luma(float r, float g, float b) { return 0.299f * r + 0.587f * g + 0.114f * b; }

// Sub-image of `box` clamped to image bounds. Left/top floored, right/bottom
// ceiled so boundary pixels are kept. Throws EmptyCrop when nothing remains.
inline GrayImage crop(const GrayImage& image, const BoundingBox& box) {
  int x0 = (int)std::floor(box.left);
  int y0 = (int)std::floor(box.top);
  int x1 = (int)std::ceil(box.right());
  int y1 = (int)std::ceil(box.bottom());
  x0 = std::max(0, x0);
  y0 = std::max(0, y0);
  x1 = std::min(image.width, x1);
  y1 = std::min(image.height, y1);
  if (x1 <= x0 || y1 <= y0) throw EmptyCrop();
  GrayImage out(x1 - x0, y1 - y0);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) out.at(x - x0, y - y0) = image.at(x, y);
  return out;
}

// ---------------------------------------------------------------------------
// Tracks

enum class TrackState { Tentative, Active, Lost, Removed };

inline const char* to_string(TrackState s) {
  switch (s) {
    case TrackState::Tentative: return "Tentative";
    case TrackState::Active: return "Active";
    case TrackState::Lost: return "Lost";
    case TrackState::Removed: return "Removed";
  }
  return "?";
}

}  // namespace emo
