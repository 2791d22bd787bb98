#pragma once

// The per-frame detect-or-skip decision and the outer tracking loop that
// wires similarity, Kalman estimation, association, and cost accounting.

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "emo/cost_model.hpp"
#include "emo/sequence_io.hpp"
#include "emo/similarity.hpp"
#include "emo/tracker.hpp"

namespace emo {

enum class PolicyKind { NoSkip, Periodic, Alternate, ContextAware };

struct SkipPolicy {
  PolicyKind kind = PolicyKind::NoSkip;
  int omega = 2;               // Periodic: detect on 1 of every omega frames
  std::string pattern;         // Periodic: optional D/S cycle, overrides omega
  int forced_cadence = 5;      // ContextAware: detect at least once every k frames
  SimilarityConfig similarity; // ContextAware measure + thresholds

  static SkipPolicy no_skip() { return {}; }
  static SkipPolicy periodic(int omega) { return {PolicyKind::Periodic, omega}; }
  static SkipPolicy periodic_pattern(std::string pattern) {
    SkipPolicy p{PolicyKind::Periodic};
    p.pattern = std::move(pattern);
    return p;
  }
  static SkipPolicy alternate() { return {PolicyKind::Alternate}; }
  static SkipPolicy context_aware(SimilarityConfig sim, int k) {
    SkipPolicy p{PolicyKind::ContextAware};
    p.similarity = sim;
    p.forced_cadence = k;
    return p;
  }
};

enum class SkipAction { Detect, Skip };
enum class SkipReason { FirstFrame, Forced, BelowThreshold, AboveThreshold, Periodic, NoTracks };

inline const char* to_string(SkipAction a) { return a == SkipAction::Detect ? "detect" : "skip"; }
inline const char* to_string(SkipReason r) {
  switch (r) {
    case SkipReason::FirstFrame: return "first_frame";
    case SkipReason::Forced: return "forced";
    case SkipReason::BelowThreshold: return "below_threshold";
    case SkipReason::AboveThreshold: return "above_threshold";
    case SkipReason::Periodic: return "periodic";
    case SkipReason::NoTracks: return "no_tracks";
  }
  return "?";
}

struct SkipDecision {
  int frame_index = 0;
  SkipAction action = SkipAction::Detect;
  std::optional<double> similarity_score;
  SkipReason reason = SkipReason::FirstFrame;
  int frames_since_detection = 0;
};

// Heuristic forced cadence: higher-FPS videos tolerate longer gaps between
// forced detections.
inline int default_forced_cadence(double fps) {
  if (fps <= 0) throw EmoError("fps must be positive");
  return std::max(2, (int)std::lround(fps / 5.0));
}

inline SkipDecision decide(const SkipPolicy& policy, int frame_index,
                           int frames_since_last_detection, std::optional<double> similarity) {
  SkipDecision d;
  d.frame_index = frame_index;
  d.similarity_score = similarity;
  d.frames_since_detection = frames_since_last_detection;
  if (frame_index == 1) {
    d.action = SkipAction::Detect;
    d.reason = SkipReason::FirstFrame;
    return d;
  }
  switch (policy.kind) {
    case PolicyKind::NoSkip:
      d.action = SkipAction::Detect;
      d.reason = SkipReason::Periodic;
      break;
    case PolicyKind::Periodic: {
      bool det;
      if (!policy.pattern.empty()) {
        const char c = policy.pattern[(frame_index - 1) % policy.pattern.size()];
        det = (c == 'D' || c == 'd');
      } else {
        det = ((frame_index - 1) % policy.omega) == 0;
      }
      d.action = det ? SkipAction::Detect : SkipAction::Skip;
      d.reason = SkipReason::Periodic;
      break;
    }
    case PolicyKind::Alternate:
      d.action = (frame_index % 2 == 1) ? SkipAction::Detect : SkipAction::Skip;
      d.reason = SkipReason::Periodic;
      break;
    case PolicyKind::ContextAware:
      if (!similarity) {
        d.action = SkipAction::Detect;
        d.reason = SkipReason::NoTracks;
      } else if (frames_since_last_detection >= policy.forced_cadence) {
        d.action = SkipAction::Detect;
        d.reason = SkipReason::Forced;
      } else if (similarity_passes(*similarity, policy.similarity)) {
        d.action = SkipAction::Skip;
        d.reason = SkipReason::AboveThreshold;
      } else {
        d.action = SkipAction::Detect;
        d.reason = SkipReason::BelowThreshold;
      }
      break;
  }
  return d;
}

struct RunOutput {
  std::vector<ResultRow> rows;
  std::vector<SkipDecision> decisions;
  CostLedger ledger;
};

struct RunOptions {
  SkipPolicy policy;
  TrackerConfig tracker;
  CostProfile cost_profile;
  SkipBoxSource box_source = SkipBoxSource::KalmanEstimate;
};

// The full Algorithm-1 style loop over one sequence. `frames` may be null for
// policies that never look at pixels (everything except ContextAware).
inline RunOutput run_sequence(int n_frames, FrameProvider* frames, DetectionSource& source,
                              const RunOptions& opt) {
  if (n_frames <= 0) throw EmoError("sequence has no frames");
  const bool needs_pixels = opt.policy.kind == PolicyKind::ContextAware;
  if (needs_pixels && !frames) throw EmoError("context-aware policy requires frame images");

  RunOutput out;
  Tracker tracker(opt.tracker);
  int frames_since_detection = 0;

  for (int f = 1; f <= n_frames; ++f) {
    if (f > 1) {
      tracker.predict();
      ++frames_since_detection;
    }

    // Similarity between last-detected crops and crops at the Kalman-estimated
    // positions in the current frame. Computed whenever the policy is
    // context-aware, even if a forced detection will fire, for the audit log.
    std::optional<double> similarity;
    if (needs_pixels && f > 1) {
      const GrayImage& img = frames->frame(f);
      std::vector<GrayImage> templates, estimations;
      for (const auto& t : tracker.tracks()) {
        if (t.template_crop.empty()) continue;
        try {
          estimations.push_back(crop(img, state_to_box(t.kalman)));
          templates.push_back(t.template_crop);
        } catch (const EmptyCrop&) {
          // estimated box left the image; this pair cannot vote
        }
      }
      similarity = frame_similarity(templates, estimations, opt.policy.similarity);
    }

    SkipDecision decision = decide(opt.policy, f, frames_since_detection, similarity);

    std::vector<TrackOutput> emitted;
    if (decision.action == SkipAction::Detect) {
      emitted = tracker.observe(source.detect(f));
      frames_since_detection = 0;
      if (needs_pixels) {
        const GrayImage& img = frames->frame(f);
        for (auto& t : tracker.mutable_tracks()) {
          if (t.frames_since_detection != 0) continue;
          try {
            t.template_crop = crop(img, t.last_box);
          } catch (const EmptyCrop&) {
            t.template_crop = GrayImage();
          }
        }
      }
    } else {
      emitted = tracker.coast(opt.box_source);
    }

    for (const auto& e : emitted) out.rows.push_back({f, e.id, e.box});
    accumulate(out.ledger, decision.action == SkipAction::Detect, opt.cost_profile);
    out.decisions.push_back(decision);
  }
  speedup(out.ledger, opt.cost_profile);
  return out;
}

// Line-oriented decision log:
// frame_index,action,reason,similarity_score(6dp, empty if none),frames_since_detection
inline void write_decision_log(std::ostream& os, const std::vector<SkipDecision>& decisions) {
  os << "frame_index,action,reason,similarity_score,frames_since_detection\n";
  char buf[64];
  for (const auto& d : decisions) {
    os << d.frame_index << ',' << to_string(d.action) << ',' << to_string(d.reason) << ',';
    if (d.similarity_score) {
      std::snprintf(buf, sizeof(buf), "%.6f", *d.similarity_score);
      os << buf;
    }
    os << ',' << d.frames_since_detection << '\n';
  }
}

}  // namespace emo
