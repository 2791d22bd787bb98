#pragma once

// MOTChallenge dataset ingestion and result emission, plus the pluggable
// detection sources (cached det files or a ground-truth-derived oracle) that
// stand in for a CNN detector.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "emo/core.hpp"
#include "emo/image_codec.hpp"

namespace emo {

struct GroundTruthEntry {
  int id = 0;
  BoundingBox box;
  int object_class = 1;    // 1 = pedestrian in MOT-16/17; MOT-15 files omit it
  double visibility = 1.0;
};

using GroundTruth = std::map<int, std::vector<GroundTruthEntry>>;  // frame -> entries

struct SequenceBundle {
  std::string name;
  double fps = 25.0;
  int width = 0;
  int height = 0;
  int length = 0;
  std::vector<std::string> frame_paths;  // index 0 holds frame 1
  std::map<int, std::vector<Detection>> detections_by_frame;
  GroundTruth ground_truth;

  bool has_ground_truth() const { return !ground_truth.empty(); }
};

// MOTChallenge convention: only pedestrians that are sufficiently visible
// count for evaluation and oracle generation.
inline GroundTruth filter_evaluation_gt(const GroundTruth& gt, double min_visibility = 0.25) {
  GroundTruth out;
  for (const auto& [frame, entries] : gt) {
    std::vector<GroundTruthEntry> kept;
    for (const auto& e : entries)
      if (e.object_class == 1 && e.visibility >= min_visibility) kept.push_back(e);
    if (!kept.empty()) out[frame] = std::move(kept);
  }
  return out;
}

namespace io_detail {

inline std::vector<double> parse_csv_fields(const std::string& line, int line_number,
                                            size_t min_fields) {
  std::vector<double> fields;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t pos = 0;
      double v = std::stod(tok, &pos);
      while (pos < tok.size() && std::isspace((unsigned char)tok[pos])) ++pos;
      if (pos != tok.size()) throw std::invalid_argument(tok);
      fields.push_back(v);
    } catch (const std::exception&) {
      throw MalformedLine(line_number, "bad numeric field '" + tok + "'");
    }
  }
  if (fields.size() < min_fields)
    throw MalformedLine(line_number, "expected at least " + std::to_string(min_fields) +
                                         " fields, got " + std::to_string(fields.size()));
  return fields;
}

inline bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace io_detail

// det.txt: frame,id,left,top,width,height,confidence,...
inline std::map<int, std::vector<Detection>> parse_detections(std::istream& in,
                                                              double min_confidence = 0.0) {
  std::map<int, std::vector<Detection>> out;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (io_detail::blank(line)) continue;
    const auto f = io_detail::parse_csv_fields(line, line_number, 7);
    Detection d;
    d.frame_index = (int)f[0];
    d.box = {f[2], f[3], f[4], f[5]};
    d.confidence = f[6];
    if (d.confidence >= min_confidence) out[d.frame_index].push_back(d);
  }
  return out;
}

// gt.txt: frame,id,left,top,width,height,flag[,class,visibility,...]
// MOT-15 ground truth omits the class/visibility columns; both layouts load.
inline GroundTruth parse_ground_truth(std::istream& in) {
  GroundTruth out;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (io_detail::blank(line)) continue;
    const auto f = io_detail::parse_csv_fields(line, line_number, 7);
    GroundTruthEntry e;
    e.id = (int)f[1];
    e.box = {f[2], f[3], f[4], f[5]};
    // MOT-16/17 rows carry class + visibility in fields 8-9; MOT-15 rows put
    // -1 world coordinates there instead, which we treat as "no class info".
    if (f.size() >= 9 && f[7] >= 0) {
      e.object_class = (int)f[7];
      e.visibility = f[8];
    }
    if (f[6] == 0) continue;  // inactive entry, excluded from evaluation
    out[(int)f[0]].push_back(e);
  }
  return out;
}

inline SequenceBundle load_sequence(const std::filesystem::path& root, double min_confidence = 0.4) {
  namespace fs = std::filesystem;
  const fs::path ini_path = root / "seqinfo.ini";
  if (!fs::exists(ini_path)) throw MissingSeqInfo(root.string());

  SequenceBundle bundle;
  bundle.name = root.filename().string();
  std::string im_dir = "img1", im_ext = ".jpg";

  std::ifstream ini(ini_path);
  std::string line;
  int line_number = 0;
  while (std::getline(ini, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (io_detail::blank(line) || line[0] == '[' || line[0] == ';' || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw MalformedLine(line_number, "expected key=value: " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "name") bundle.name = value;
      else if (key == "frameRate") bundle.fps = std::stod(value);
      else if (key == "seqLength") bundle.length = std::stoi(value);
      else if (key == "imWidth") bundle.width = std::stoi(value);
      else if (key == "imHeight") bundle.height = std::stoi(value);
      else if (key == "imDir") im_dir = value;
      else if (key == "imExt") im_ext = value;
    } catch (const std::exception&) {
      throw MalformedLine(line_number, "bad value for " + key + ": " + value);
    }
  }
  if (bundle.length <= 0 || bundle.fps <= 0)
    throw MalformedLine(line_number, "seqinfo.ini missing seqLength/frameRate");

  bundle.frame_paths.reserve(bundle.length);
  for (int f = 1; f <= bundle.length; ++f) {
    char name[16];
    std::snprintf(name, sizeof(name), "%06d", f);
    fs::path p = root / im_dir / (std::string(name) + im_ext);
    if (!fs::exists(p)) throw MissingFrameFile(p.string());
    bundle.frame_paths.push_back(p.string());
  }

  if (fs::exists(root / "det" / "det.txt")) {
    std::ifstream det(root / "det" / "det.txt");
    bundle.detections_by_frame = parse_detections(det, min_confidence);
  }
  if (fs::exists(root / "gt" / "gt.txt")) {
    std::ifstream gt(root / "gt" / "gt.txt");
    bundle.ground_truth = parse_ground_truth(gt);
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// Results

struct ResultRow {
  int frame = 0;
  int id = 0;
  BoundingBox box;
};

// MOT result format: frame,id,left,top,width,height,1,-1,-1,-1 with two
// decimal places, rows sorted by (frame, id).
inline void write_results(std::ostream& out, std::vector<ResultRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
  });
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.2f,%.2f,%.2f,%.2f,1,-1,-1,-1\n", r.frame, r.id,
                  r.box.left, r.box.top, r.box.width, r.box.height);
    out << buf;
  }
}

inline void write_results_file(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EmoError("cannot open for write: " + path);
  write_results(out, rows);
}

inline std::vector<ResultRow> read_results(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (io_detail::blank(line)) continue;
    const auto f = io_detail::parse_csv_fields(line, line_number, 6);
    rows.push_back({(int)f[0], (int)f[1], {f[2], f[3], f[4], f[5]}});
  }
  return rows;
}

inline std::vector<ResultRow> read_results_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EmoError("cannot open results file: " + path);
  return read_results(in);
}

// ---------------------------------------------------------------------------
// Detection sources

class DetectionSource {
 public:
  virtual ~DetectionSource() = default;
  std::vector<Detection> detect(int frame_index) {
    ++calls_;
    return produce(frame_index);
  }
  int calls() const { return calls_; }

 protected:
  virtual std::vector<Detection> produce(int frame_index) = 0;

 private:
  int calls_ = 0;
};

class FileDetectionSource : public DetectionSource {
 public:
  explicit FileDetectionSource(std::map<int, std::vector<Detection>> by_frame)
      : by_frame_(std::move(by_frame)) {}

 protected:
  std::vector<Detection> produce(int frame_index) override {
    auto it = by_frame_.find(frame_index);
    return it == by_frame_.end() ? std::vector<Detection>{} : it->second;
  }

 private:
  std::map<int, std::vector<Detection>> by_frame_;
};

struct OracleConfig {
  double jitter_sigma = 0.0;     // pixels, on all four box fields
  double drop_probability = 0.0; // each GT box independently dropped
  double false_positive_rate = 0.0;  // expected FPs = rate * |gt boxes|
  uint64_t seed = 0;
  double min_visibility = 0.25;
};

namespace oracle_detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Fixed draw order on top of mt19937_64 so outputs are byte-reproducible
// across platforms: per GT box the drop draw, then four jitter normals (two
// uniforms each, Box-Muller); then the FP count; then per FP the size and
// position draws.
struct OracleRng {
  std::mt19937_64 engine;
  explicit OracleRng(uint64_t seed) : engine(seed) {}

  double uniform() {  // in (0,1)
    return (double(engine() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }
  double normal() {
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  int poisson(double lambda) {
    if (lambda <= 0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }
};

}  // namespace oracle_detail

// Synthesizes detections for one frame from ground truth: independent drops,
// Gaussian jitter, and uniformly placed false positives. Deterministic per
// (frame, seed).
inline std::vector<Detection> oracle_detections(const std::vector<GroundTruthEntry>& gt_boxes,
                                                int frame_index, int image_width, int image_height,
                                                const OracleConfig& cfg) {
  oracle_detail::OracleRng rng(
      oracle_detail::splitmix64(cfg.seed ^ (uint64_t(frame_index) * 0x9e3779b97f4a7c15ULL)));
  std::vector<Detection> out;
  for (const auto& e : gt_boxes) {
    if (rng.uniform() < cfg.drop_probability) continue;
    Detection d;
    d.frame_index = frame_index;
    d.box = e.box;
    if (cfg.jitter_sigma > 0) {
      d.box.left += cfg.jitter_sigma * rng.normal();
      d.box.top += cfg.jitter_sigma * rng.normal();
      d.box.width = std::max(1.0, d.box.width + cfg.jitter_sigma * rng.normal());
      d.box.height = std::max(1.0, d.box.height + cfg.jitter_sigma * rng.normal());
    } else {
      // burn the jitter draws so the stream layout is independent of sigma
      for (int i = 0; i < 4; ++i) (void)rng.normal();
    }
    d.confidence = 1.0;
    out.push_back(d);
  }
  const int n_fp = rng.poisson(cfg.false_positive_rate * double(gt_boxes.size()));
  for (int i = 0; i < n_fp; ++i) {
    Detection d;
    d.frame_index = frame_index;
    d.box.width = 10.0 + rng.uniform() * 50.0;
    d.box.height = 20.0 + rng.uniform() * 100.0;
    d.box.left = rng.uniform() * std::max(1.0, image_width - d.box.width);
    d.box.top = rng.uniform() * std::max(1.0, image_height - d.box.height);
    d.confidence = 1.0;
    out.push_back(d);
  }
  return out;
}

class OracleDetectionSource : public DetectionSource {
 public:
  OracleDetectionSource(const GroundTruth& gt, int width, int height, OracleConfig cfg)
      : gt_(filter_evaluation_gt(gt, cfg.min_visibility)), width_(width), height_(height),
        cfg_(cfg) {
    if (gt.empty()) throw NoGroundTruth();
  }

 protected:
  std::vector<Detection> produce(int frame_index) override {
    auto it = gt_.find(frame_index);
    static const std::vector<GroundTruthEntry> kEmpty;
    return oracle_detections(it == gt_.end() ? kEmpty : it->second, frame_index, width_, height_,
                             cfg_);
  }

 private:
  GroundTruth gt_;
  int width_, height_;
  OracleConfig cfg_;
};

// ---------------------------------------------------------------------------
// Frame providers

class FrameProvider {
 public:
  virtual ~FrameProvider() = default;
  virtual const GrayImage& frame(int frame_index) = 0;  // 1-based
};

class DirectoryFrameProvider : public FrameProvider {
 public:
  explicit DirectoryFrameProvider(std::vector<std::string> paths) : paths_(std::move(paths)) {}
  const GrayImage& frame(int frame_index) override {
    if (frame_index < 1 || frame_index > (int)paths_.size())
      throw MissingFrameFile("frame " + std::to_string(frame_index));
    if (frame_index != cached_index_) {
      cached_ = load_frame(paths_[frame_index - 1]);
      cached_index_ = frame_index;
    }
    return cached_;
  }

 private:
  std::vector<std::string> paths_;
  GrayImage cached_;
  int cached_index_ = -1;
};

class MemoryFrameProvider : public FrameProvider {
 public:
  explicit MemoryFrameProvider(std::vector<GrayImage> frames) : frames_(std::move(frames)) {}
  const GrayImage& frame(int frame_index) override {
    if (frame_index < 1 || frame_index > (int)frames_.size())
      throw MissingFrameFile("frame " + std::to_string(frame_index));
    return frames_[frame_index - 1];
  }

 private:
  std::vector<GrayImage> frames_;
};

}  // namespace emo
