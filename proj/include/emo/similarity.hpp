#pragma once

// The three low-cost image similarity measures driving the skip decision:
// normalized cross correlation (Pearson), HOG cosine similarity, and the
// smaller-eigenvalue measure over paired gray levels.

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "emo/core.hpp"
#include "emo/image.hpp"

namespace emo {

enum class SimilarityMeasure { NCC, HOG, Eigenvalue };

enum class EigenAggregation { Mean, Sum };

struct HogParams {
  int cell_size = 8;
  int bins = 9;
  int block_cells = 2;  // 2x2 cells per block
  int resize_w = 64;
  int resize_h = 128;
};

struct SimilarityConfig {
  SimilarityMeasure measure = SimilarityMeasure::NCC;
  double ncc_threshold = 0.75;
  double hog_threshold = 0.85;
  double eigen_threshold = 100.0;  // per-video, no universal default
  EigenAggregation eigen_agg = EigenAggregation::Mean;
  HogParams hog;
  int ncc_resize_w = 32;
  int ncc_resize_h = 32;
};

// Pearson correlation of the two crops after resampling both onto a common
// 32x32 support. Zero-variance crops: 1 if both are the same constant, else 0.
inline double ncc(const GrayImage& tmpl, const GrayImage& candidate, int resize_w = 32,
                  int resize_h = 32) {
  if (tmpl.empty() || candidate.empty()) throw EmptyCrop();
  const GrayImage a = resize_bilinear(tmpl, resize_w, resize_h);
  const GrayImage b = resize_bilinear(candidate, resize_w, resize_h);
  const size_t n = a.data.size();
  double mean_a = 0, mean_b = 0;
  for (size_t i = 0; i < n; ++i) {
    mean_a += a.data[i];
    mean_b += b.data[i];
  }
  mean_a /= double(n);
  mean_b /= double(n);
  double saa = 0, sbb = 0, sab = 0;
  for (size_t i = 0; i < n; ++i) {
    const double da = a.data[i] - mean_a;
    const double db = b.data[i] - mean_b;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  constexpr double kVarEps = 1e-12;
  if (saa < kVarEps || sbb < kVarEps) {
    const bool both_constant = saa < kVarEps && sbb < kVarEps;
    return (both_constant && std::abs(mean_a - mean_b) < 1e-9) ? 1.0 : 0.0;
  }
  return sab / std::sqrt(saa * sbb);
}

// Dalal-Triggs style HOG: gradient orientation histograms per 8x8 cell,
// 2x2-cell blocks with L2 normalization, concatenated and unit-normalized.
// A constant image has no gradients and yields the zero vector.
inline std::vector<double> hog_features(const GrayImage& image, const HogParams& p = {}) {
  if (image.empty()) throw EmptyCrop();
  const GrayImage img = resize_bilinear(image, p.resize_w, p.resize_h);
  const int cells_x = p.resize_w / p.cell_size;
  const int cells_y = p.resize_h / p.cell_size;
  std::vector<double> hist(size_t(cells_x) * cells_y * p.bins, 0.0);
  const double bin_width = 180.0 / p.bins;

  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const int xm = std::max(x - 1, 0), xp = std::min(x + 1, img.width - 1);
      const int ym = std::max(y - 1, 0), yp = std::min(y + 1, img.height - 1);
      const double gx = img.at(xp, y) - img.at(xm, y);
      const double gy = img.at(x, yp) - img.at(x, ym);
      const double mag = std::sqrt(gx * gx + gy * gy);
      if (mag == 0) continue;
      double angle = std::atan2(gy, gx) * 180.0 / M_PI;  // unsigned orientation
      if (angle < 0) angle += 180.0;
      if (angle >= 180.0) angle -= 180.0;
      // linear vote into the two nearest orientation bins
      const double pos = angle / bin_width - 0.5;
      int b0 = (int)std::floor(pos);
      const double w1 = pos - b0;
      int b1 = b0 + 1;
      if (b0 < 0) b0 += p.bins;
      if (b1 >= p.bins) b1 -= p.bins;
      const int cx = std::min(x / p.cell_size, cells_x - 1);
      const int cy = std::min(y / p.cell_size, cells_y - 1);
      double* cell = &hist[(size_t(cy) * cells_x + cx) * p.bins];
      cell[b0] += mag * (1.0 - w1);
      cell[b1] += mag * w1;
    }
  }

  // block normalization, stride one cell
  const int blocks_x = cells_x - (p.block_cells - 1);
  const int blocks_y = cells_y - (p.block_cells - 1);
  const int block_len = p.block_cells * p.block_cells * p.bins;
  std::vector<double> features;
  features.reserve(size_t(blocks_x) * blocks_y * block_len);
  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      const size_t start = features.size();
      double norm2 = 0;
      for (int cy = by; cy < by + p.block_cells; ++cy)
        for (int cx = bx; cx < bx + p.block_cells; ++cx)
          for (int b = 0; b < p.bins; ++b) {
            const double v = hist[(size_t(cy) * cells_x + cx) * p.bins + b];
            features.push_back(v);
            norm2 += v * v;
          }
      if (norm2 > 0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (size_t i = start; i < features.size(); ++i) features[i] *= inv;
      }
    }
  }
  double total = std::inner_product(features.begin(), features.end(), features.begin(), 0.0);
  if (total > 0) {
    const double inv = 1.0 / std::sqrt(total);
    for (auto& f : features) f *= inv;
  }
  return features;
}

// Cosine of the HOG feature vectors; 0 if either vector is zero.
inline double hog_similarity(const GrayImage& a, const GrayImage& b, const HogParams& p = {}) {
  const auto fa = hog_features(a, p);
  const auto fb = hog_features(b, p);
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < fa.size(); ++i) {
    dot += fa[i] * fb[i];
    na += fa[i] * fa[i];
    nb += fb[i] * fb[i];
  }
  if (na <= 0 || nb <= 0) return 0.0;
  return dot / std::sqrt(na * nb);
}

// Smaller eigenvalue of the 2x2 covariance of paired gray levels (a_i, b_i).
// Zero for identical images (pairs collinear), grows with dissimilarity.
inline double eigen_similarity(const GrayImage& a, const GrayImage& b) {
  if (a.empty() || b.empty()) throw EmptyCrop();
  const GrayImage bb = resize_bilinear(b, a.width, a.height);
  const size_t n = a.data.size();
  double ma = 0, mb = 0;
  for (size_t i = 0; i < n; ++i) {
    ma += a.data[i];
    mb += bb.data[i];
  }
  ma /= double(n);
  mb /= double(n);
  double vaa = 0, vbb = 0, vab = 0;
  for (size_t i = 0; i < n; ++i) {
    const double da = a.data[i] - ma;
    const double db = bb.data[i] - mb;
    vaa += da * da;
    vbb += db * db;
    vab += da * db;
  }
  vaa /= double(n);
  vbb /= double(n);
  vab /= double(n);
  const double half_trace = (vaa + vbb) / 2.0;
  const double disc = std::sqrt(((vaa - vbb) / 2.0) * ((vaa - vbb) / 2.0) + vab * vab);
  return std::max(0.0, half_trace - disc);
}

inline double pair_similarity(const GrayImage& tmpl, const GrayImage& est,
                              const SimilarityConfig& cfg) {
  switch (cfg.measure) {
    case SimilarityMeasure::NCC: return ncc(tmpl, est, cfg.ncc_resize_w, cfg.ncc_resize_h);
    case SimilarityMeasure::HOG: return hog_similarity(tmpl, est, cfg.hog);
    case SimilarityMeasure::Eigenvalue: return eigen_similarity(tmpl, est);
  }
  return 0.0;
}

// Mean (or sum, for the eigenvalue measure when configured) of per-pair
// similarity in track order. nullopt signals "no tracks, must detect".
inline std::optional<double> frame_similarity(const std::vector<GrayImage>& prev_crops,
                                              const std::vector<GrayImage>& est_crops,
                                              const SimilarityConfig& cfg) {
  if (prev_crops.size() != est_crops.size()) throw EmoError("crop list length mismatch");
  if (prev_crops.empty()) return std::nullopt;
  double total = 0;
  for (size_t i = 0; i < prev_crops.size(); ++i)
    total += pair_similarity(prev_crops[i], est_crops[i], cfg);
  if (cfg.measure == SimilarityMeasure::Eigenvalue && cfg.eigen_agg == EigenAggregation::Sum)
    return total;
  return total / double(prev_crops.size());
}

// The skip predicate: true means the frame may be skipped. NCC/HOG skip on
// high similarity; the eigenvalue measure skips below its threshold.
inline bool similarity_passes(double score, const SimilarityConfig& cfg) {
  switch (cfg.measure) {
    case SimilarityMeasure::NCC: return score >= cfg.ncc_threshold;
    case SimilarityMeasure::HOG: return score >= cfg.hog_threshold;
    case SimilarityMeasure::Eigenvalue: return score <= cfg.eigen_threshold;
  }
  return false;
}

}  // namespace emo
