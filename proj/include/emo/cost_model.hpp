#pragma once

// Simulated per-frame latency accounting. A detected frame pays
// t_detection + t_decision; a skipped frame pays t_decision + t_estimation.
// The no-skip baseline used for the speedup ratio is n_frames * t_detection.

#include "emo/core.hpp"

namespace emo {

struct CostProfile {
  double t_detection = 0.248551353;  // seconds per detected frame
  double t_decision = 0.026890381;   // position estimation + similarity, every frame
  double t_estimation = 0.000341388; // extra position estimation on skipped frames

  static CostProfile mot17() { return {0.248551353, 0.026890381, 0.000341388}; }
  static CostProfile mot15() { return {0.246894905, 0.011596515, 0.000252304}; }
};

struct CostLedger {
  long n_frames = 0;
  long n_detected = 0;
  long n_skipped = 0;
  double total_time = 0.0;
  double speedup_vs_noskip = 0.0;  // filled by speedup()
};

inline void accumulate(CostLedger& ledger, bool detected, const CostProfile& profile) {
  ledger.n_frames += 1;
  if (detected) {
    ledger.n_detected += 1;
    ledger.total_time += profile.t_detection + profile.t_decision;
  } else {
    ledger.n_skipped += 1;
    ledger.total_time += profile.t_decision + profile.t_estimation;
  }
}

// Ratio of accumulated time to the no-skip baseline (which pays detection
// only). < 1 means the policy is cheaper than detecting every frame.
inline double speedup(CostLedger& ledger, const CostProfile& profile) {
  if (ledger.n_frames <= 0) throw EmoError("empty ledger");
  ledger.speedup_vs_noskip = ledger.total_time / (double(ledger.n_frames) * profile.t_detection);
  return ledger.speedup_vs_noskip;
}

}  // namespace emo
