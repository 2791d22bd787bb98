#pragma once

// Detection-frame association (cost matrix + Hungarian + gating) and track
// lifecycle. One Tracker instance owns one sequence.

#include <optional>
#include <vector>

#include "emo/assignment.hpp"
#include "emo/core.hpp"
#include "emo/kalman.hpp"

namespace emo {

struct TrackerConfig {
  double iou_gate = 0.3;            // minimum IoU for a valid match
  int max_lost_frames = 30;         // Lost longer than this -> Removed
  double min_confidence = 0.4;      // detection confidence floor
  int tentative_confirm_frames = 2; // consecutive matches before emission
  KalmanConfig kalman;
};

struct Track {
  int id = 0;
  TrackState state = TrackState::Tentative;
  KalmanState kalman;
  BoundingBox last_box;          // last matched detection box
  GrayImage template_crop;       // crop at last_box from the last detected frame
  int consecutive_hits = 0;      // consecutive detection-frame matches
  int frames_since_detection = 0;
  int total_age = 0;
  int missed_frames = 0;         // consecutive frames without a match
};

enum class SkipBoxSource { ReusePrevious, KalmanEstimate };

struct TrackOutput {
  int id;
  BoundingBox box;
};

inline CostMatrix iou_cost_matrix(const std::vector<Track>& tracks,
                                  const std::vector<Detection>& detections) {
  CostMatrix costs(tracks.size(), std::vector<double>(detections.size(), 1.0));
  for (size_t i = 0; i < tracks.size(); ++i) {
    const BoundingBox predicted = state_to_box(tracks[i].kalman);
    for (size_t j = 0; j < detections.size(); ++j)
      costs[i][j] = 1.0 - iou(predicted, detections[j].box);
  }
  return costs;
}

class Tracker {
 public:
  explicit Tracker(TrackerConfig config = {}) : config_(config) {}

  // Advance every live track's Kalman state by one frame. Called once per
  // frame, before the skip decision; both paths reuse the same prediction.
  void predict() {
    for (auto& t : tracks_) {
      t.kalman = kalman_predict(t.kalman, config_.kalman);
      t.total_age += 1;
    }
  }

  // Detection-frame path. Returns the boxes emitted for this frame.
  std::vector<TrackOutput> observe(const std::vector<Detection>& raw_detections) {
    std::vector<Detection> detections;
    for (const auto& d : raw_detections)
      if (d.confidence >= config_.min_confidence) detections.push_back(d);

    const auto assignment = solve_assignment(iou_cost_matrix(tracks_, detections),
                                             1.0 - config_.iou_gate, (int)detections.size());

    std::vector<TrackOutput> outputs;
    std::vector<char> det_used(detections.size(), 0);
    for (const auto& [ti, dj] : assignment.matches) {
      Track& t = tracks_[ti];
      det_used[dj] = 1;
      t.kalman = kalman_update(t.kalman, detections[dj].box, config_.kalman);
      t.last_box = detections[dj].box;
      t.frames_since_detection = 0;
      t.missed_frames = 0;
      t.consecutive_hits += 1;
      if (t.state == TrackState::Lost) t.state = TrackState::Active;  // reactivation
      if (t.state == TrackState::Tentative && t.consecutive_hits >= config_.tentative_confirm_frames)
        t.state = TrackState::Active;
      if (t.state == TrackState::Active) outputs.push_back({t.id, t.last_box});
    }

    for (int ti : assignment.unmatched_rows) miss(tracks_[ti]);

    for (int dj : assignment.unmatched_cols) {
      Track t;
      t.id = next_id_++;
      t.kalman = kalman_init(detections[dj].box, config_.kalman);
      t.last_box = detections[dj].box;
      t.consecutive_hits = 1;
      t.state = config_.tentative_confirm_frames <= 1 ? TrackState::Active : TrackState::Tentative;
      if (t.state == TrackState::Active) outputs.push_back({t.id, t.last_box});
      tracks_.push_back(std::move(t));
    }

    prune();
    sort_outputs(outputs);
    return outputs;
  }

  // Skipped-frame path: no filter update, no new tracks; Active tracks emit
  // either their Kalman prediction or the reused previous detection box.
  std::vector<TrackOutput> coast(SkipBoxSource source) {
    std::vector<TrackOutput> outputs;
    for (auto& t : tracks_) {
      t.frames_since_detection += 1;
      if (t.state == TrackState::Lost) {
        t.missed_frames += 1;
        if (t.missed_frames > config_.max_lost_frames) t.state = TrackState::Removed;
      }
      if (t.state == TrackState::Active) {
        const BoundingBox box =
            source == SkipBoxSource::KalmanEstimate ? state_to_box(t.kalman) : t.last_box;
        outputs.push_back({t.id, box});
      }
    }
    prune();
    sort_outputs(outputs);
    return outputs;
  }

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return config_; }
  std::vector<Track>& mutable_tracks() { return tracks_; }

 private:
  void miss(Track& t) {
    t.frames_since_detection += 1;
    t.missed_frames += 1;
    t.consecutive_hits = 0;
    if (t.state == TrackState::Tentative) {
      t.state = TrackState::Removed;  // unconfirmed track lost on first miss
    } else if (t.state == TrackState::Active) {
      t.state = TrackState::Lost;
    } else if (t.state == TrackState::Lost && t.missed_frames > config_.max_lost_frames) {
      t.state = TrackState::Removed;
    }
  }

  void prune() {
    std::erase_if(tracks_, [](const Track& t) { return t.state == TrackState::Removed; });
  }

  static void sort_outputs(std::vector<TrackOutput>& outputs) {
    std::sort(outputs.begin(), outputs.end(),
              [](const TrackOutput& a, const TrackOutput& b) { return a.id < b.id; });
  }

  TrackerConfig config_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
};

}  // namespace emo
