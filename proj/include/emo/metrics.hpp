#pragma once

// CLEAR metrics (MOTA/MOTP/IDSW), identity metrics (IDP/IDR/IDF1), and HOTA
// with its sub-metrics. All operate on frame-indexed (id, box) streams and
// keep raw counts so multi-sequence aggregates pool counts, not percentages.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "emo/assignment.hpp"
#include "emo/core.hpp"
#include "emo/sequence_io.hpp"

namespace emo {

struct IdBox {
  int id = 0;
  BoundingBox box;
};

using TrackedSequence = std::map<int, std::vector<IdBox>>;  // frame -> boxes

inline TrackedSequence to_tracked(const GroundTruth& gt, double min_visibility = 0.25) {
  TrackedSequence out;
  for (const auto& [frame, entries] : filter_evaluation_gt(gt, min_visibility))
    for (const auto& e : entries) out[frame].push_back({e.id, e.box});
  return out;
}

inline TrackedSequence to_tracked(const std::vector<ResultRow>& rows) {
  TrackedSequence out;
  for (const auto& r : rows) out[r.frame].push_back({r.id, r.box});
  return out;
}

namespace metrics_detail {

constexpr double kForbidden = 1e9;

inline std::vector<int> sorted_frames(const TrackedSequence& a, const TrackedSequence& b) {
  std::vector<int> frames;
  for (const auto& [f, _] : a) frames.push_back(f);
  for (const auto& [f, _] : b) frames.push_back(f);
  std::sort(frames.begin(), frames.end());
  frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
  return frames;
}

inline const std::vector<IdBox>& boxes_at(const TrackedSequence& s, int frame) {
  static const std::vector<IdBox> kEmpty;
  auto it = s.find(frame);
  return it == s.end() ? kEmpty : it->second;
}

}  // namespace metrics_detail

// ---------------------------------------------------------------------------
// CLEAR

struct FrameMatch {
  int gt_id;
  int pred_id;
  double overlap;
};

struct MatchedFrames {
  std::map<int, std::vector<FrameMatch>> per_frame;
  long tp = 0, fp = 0, fn = 0, gt_total = 0;
  double iou_sum = 0.0;
};

// Per-frame one-to-one matching at IoU >= threshold. Pairings carried over
// from earlier frames are kept first (the CLEAR continuity rule); the rest
// is matched by Hungarian maximizing match count, then total IoU.
inline MatchedFrames match_frames(const TrackedSequence& gt, const TrackedSequence& pred,
                                  double iou_threshold = 0.5) {
  MatchedFrames out;
  std::map<int, int> last_pred;  // gt id -> pred id of its most recent match

  for (int frame : metrics_detail::sorted_frames(gt, pred)) {
    const auto& g = metrics_detail::boxes_at(gt, frame);
    const auto& p = metrics_detail::boxes_at(pred, frame);
    out.gt_total += (long)g.size();

    std::vector<FrameMatch>& matches = out.per_frame[frame];
    std::vector<char> g_used(g.size(), 0), p_used(p.size(), 0);

    // continuity: keep still-overlapping previous pairings, lowest gt id first
    std::vector<size_t> g_order(g.size());
    for (size_t i = 0; i < g.size(); ++i) g_order[i] = i;
    std::sort(g_order.begin(), g_order.end(),
              [&](size_t a, size_t b) { return g[a].id < g[b].id; });
    for (size_t gi : g_order) {
      auto it = last_pred.find(g[gi].id);
      if (it == last_pred.end()) continue;
      for (size_t pj = 0; pj < p.size(); ++pj) {
        if (p_used[pj] || p[pj].id != it->second) continue;
        const double ov = iou(g[gi].box, p[pj].box);
        if (ov >= iou_threshold) {
          matches.push_back({g[gi].id, p[pj].id, ov});
          g_used[gi] = 1;
          p_used[pj] = 1;
        }
        break;
      }
    }

    // Hungarian over the remainder
    std::vector<size_t> g_rem, p_rem;
    for (size_t i = 0; i < g.size(); ++i)
      if (!g_used[i]) g_rem.push_back(i);
    for (size_t j = 0; j < p.size(); ++j)
      if (!p_used[j]) p_rem.push_back(j);
    if (!g_rem.empty() && !p_rem.empty()) {
      CostMatrix costs(g_rem.size(), std::vector<double>(p_rem.size()));
      for (size_t a = 0; a < g_rem.size(); ++a)
        for (size_t b = 0; b < p_rem.size(); ++b) {
          const double ov = iou(g[g_rem[a]].box, p[p_rem[b]].box);
          costs[a][b] = ov >= iou_threshold ? 1.0 - ov : metrics_detail::kForbidden;
        }
      const auto result = solve_assignment(costs, metrics_detail::kForbidden);
      for (const auto& [a, b] : result.matches) {
        const size_t gi = g_rem[a], pj = p_rem[b];
        matches.push_back({g[gi].id, p[pj].id, iou(g[gi].box, p[pj].box)});
      }
    }

    out.tp += (long)matches.size();
    out.fn += (long)g.size() - (long)matches.size();
    out.fp += (long)p.size() - (long)matches.size();
    for (const auto& m : matches) {
      out.iou_sum += m.overlap;
      last_pred[m.gt_id] = m.pred_id;
    }
  }
  return out;
}

struct ClearResult {
  std::optional<double> mota;  // unset when there is no ground truth
  double motp = 0.0;           // mean IoU over TPs, higher is better
  long idsw = 0;
  long tp = 0, fp = 0, fn = 0, gt_total = 0;
  double iou_sum = 0.0;
};

inline ClearResult clear_metrics(const TrackedSequence& gt, const TrackedSequence& pred,
                                 double iou_threshold = 0.5) {
  const MatchedFrames mf = match_frames(gt, pred, iou_threshold);
  ClearResult r;
  r.tp = mf.tp;
  r.fp = mf.fp;
  r.fn = mf.fn;
  r.gt_total = mf.gt_total;
  r.iou_sum = mf.iou_sum;

  // an ID switch: a ground-truth object is matched to a different predicted
  // id than in its most recent earlier match
  std::map<int, int> last_pred;
  for (const auto& [frame, matches] : mf.per_frame) {
    for (const auto& m : matches) {
      auto it = last_pred.find(m.gt_id);
      if (it != last_pred.end() && it->second != m.pred_id) ++r.idsw;
      last_pred[m.gt_id] = m.pred_id;
    }
  }

  r.motp = r.tp > 0 ? r.iou_sum / double(r.tp) : 0.0;
  if (r.gt_total > 0) r.mota = 1.0 - double(r.fn + r.fp + r.idsw) / double(r.gt_total);
  return r;
}

// ---------------------------------------------------------------------------
// Identity metrics

struct IdResult {
  double idp = 0.0, idr = 0.0, idf1 = 0.0;
  long idtp = 0, idfp = 0, idfn = 0;
};

// Global trajectory-level bipartite matching maximizing IDTP. Unmatched
// trajectories count all their frames as IDFN/IDFP.
inline IdResult id_metrics(const TrackedSequence& gt, const TrackedSequence& pred,
                           double iou_threshold = 0.5) {
  std::map<int, long> gt_len, pred_len;
  std::map<std::pair<int, int>, long> overlap_frames;
  for (int frame : metrics_detail::sorted_frames(gt, pred)) {
    const auto& g = metrics_detail::boxes_at(gt, frame);
    const auto& p = metrics_detail::boxes_at(pred, frame);
    for (const auto& gb : g) gt_len[gb.id] += 1;
    for (const auto& pb : p) pred_len[pb.id] += 1;
    for (const auto& gb : g)
      for (const auto& pb : p)
        if (iou(gb.box, pb.box) >= iou_threshold) overlap_frames[{gb.id, pb.id}] += 1;
  }

  std::vector<int> gt_ids, pred_ids;
  for (const auto& [id, _] : gt_len) gt_ids.push_back(id);
  for (const auto& [id, _] : pred_len) pred_ids.push_back(id);
  const int ng = (int)gt_ids.size(), np = (int)pred_ids.size();
  long total_gt = 0, total_pred = 0;
  for (const auto& [_, n] : gt_len) total_gt += n;
  for (const auto& [_, n] : pred_len) total_pred += n;

  long idtp = 0;
  if (ng > 0 && np > 0) {
    // square (ng+np) matrix; dummy columns/rows express leaving an id unmatched
    const int n = ng + np;
    CostMatrix costs(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i < ng && j < np) {
          auto it = overlap_frames.find({gt_ids[i], pred_ids[j]});
          const long m = it == overlap_frames.end() ? 0 : it->second;
          costs[i][j] = double(gt_len[gt_ids[i]] + pred_len[pred_ids[j]] - 2 * m);
        } else if (i < ng) {
          costs[i][j] = double(gt_len[gt_ids[i]]);
        } else if (j < np) {
          costs[i][j] = double(pred_len[pred_ids[j]]);
        }
      }
    const auto row_to_col = solve_square_assignment(costs, n);
    for (int i = 0; i < ng; ++i) {
      const int j = row_to_col[i];
      if (j >= 0 && j < np) {
        auto it = overlap_frames.find({gt_ids[i], pred_ids[j]});
        if (it != overlap_frames.end()) idtp += it->second;
      }
    }
  }

  IdResult r;
  r.idtp = idtp;
  r.idfn = total_gt - idtp;
  r.idfp = total_pred - idtp;
  r.idp = total_pred > 0 ? double(idtp) / double(total_pred) : 0.0;
  r.idr = total_gt > 0 ? double(idtp) / double(total_gt) : 0.0;
  const double denom = double(2 * idtp + r.idfp + r.idfn);
  r.idf1 = denom > 0 ? 2.0 * double(idtp) / denom : (total_gt == 0 && total_pred == 0 ? 1.0 : 0.0);
  return r;
}

// ---------------------------------------------------------------------------
// HOTA

struct HotaAlpha {
  double alpha = 0.0;
  double hota = 0.0, deta = 0.0, assa = 0.0, loca = 0.0;
  long tp = 0, fn = 0, fp = 0;
  double loc_sum = 0.0;  // sum of IoU over TPs
  double ass_sum = 0.0;  // sum of Ass-IoU over TPs
};

struct HotaResult {
  double hota = 0.0, deta = 0.0, assa = 0.0, loca = 0.0;
  std::vector<HotaAlpha> alphas;  // 19 rows, alpha = 0.05 .. 0.95
};

inline HotaResult hota(const TrackedSequence& gt, const TrackedSequence& pred) {
  // dense indexing of ids
  std::map<int, int> gt_index, pred_index;
  for (const auto& [_, boxes] : gt)
    for (const auto& b : boxes) gt_index.emplace(b.id, 0);
  for (const auto& [_, boxes] : pred)
    for (const auto& b : boxes) pred_index.emplace(b.id, 0);
  {
    int k = 0;
    for (auto& [_, v] : gt_index) v = k++;
    k = 0;
    for (auto& [_, v] : pred_index) v = k++;
  }
  const int ng = (int)gt_index.size(), np = (int)pred_index.size();

  struct FrameData {
    std::vector<int> gi, pj;
    std::vector<std::vector<double>> ious;  // |gi| x |pj|
  };
  std::vector<FrameData> frames;
  std::vector<long> gt_count(ng, 0), pred_count(np, 0);
  long gt_total = 0, pred_total = 0;
  for (int frame : metrics_detail::sorted_frames(gt, pred)) {
    const auto& g = metrics_detail::boxes_at(gt, frame);
    const auto& p = metrics_detail::boxes_at(pred, frame);
    FrameData fd;
    for (const auto& b : g) {
      fd.gi.push_back(gt_index[b.id]);
      gt_count[gt_index[b.id]] += 1;
    }
    for (const auto& b : p) {
      fd.pj.push_back(pred_index[b.id]);
      pred_count[pred_index[b.id]] += 1;
    }
    gt_total += (long)g.size();
    pred_total += (long)p.size();
    fd.ious.assign(g.size(), std::vector<double>(p.size(), 0.0));
    for (size_t a = 0; a < g.size(); ++a)
      for (size_t b = 0; b < p.size(); ++b) fd.ious[a][b] = iou(g[a].box, p[b].box);
    frames.push_back(std::move(fd));
  }

  // global alignment: soft co-occurrence of each (gt, pred) trajectory pair
  std::vector<std::vector<double>> potential(ng, std::vector<double>(np, 0.0));
  for (const auto& fd : frames) {
    std::vector<double> row_sum(fd.gi.size(), 0.0), col_sum(fd.pj.size(), 0.0);
    for (size_t a = 0; a < fd.gi.size(); ++a)
      for (size_t b = 0; b < fd.pj.size(); ++b) {
        row_sum[a] += fd.ious[a][b];
        col_sum[b] += fd.ious[a][b];
      }
    for (size_t a = 0; a < fd.gi.size(); ++a)
      for (size_t b = 0; b < fd.pj.size(); ++b) {
        const double s = fd.ious[a][b];
        if (s <= 0) continue;
        potential[fd.gi[a]][fd.pj[b]] += s / (row_sum[a] + col_sum[b] - s);
      }
  }
  std::vector<std::vector<double>> alignment(ng, std::vector<double>(np, 0.0));
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < np; ++j) {
      const double denom = double(gt_count[i] + pred_count[j]) - potential[i][j];
      alignment[i][j] = denom > 0 ? potential[i][j] / denom : 0.0;
    }

  HotaResult result;
  result.alphas.resize(19);
  for (int ai = 0; ai < 19; ++ai) {
    const double alpha = double(ai + 1) / 20.0;
    HotaAlpha& row = result.alphas[ai];
    row.alpha = alpha;

    std::map<std::pair<int, int>, long> matches_count;
    long tp = 0;
    double loc_sum = 0.0;
    for (const auto& fd : frames) {
      const int r = (int)fd.gi.size(), c = (int)fd.pj.size();
      if (r == 0 || c == 0) continue;
      const int n = std::max(r, c);
      CostMatrix costs(n, std::vector<double>(n, 0.0));
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < c; ++b)
          costs[a][b] = -(alignment[fd.gi[a]][fd.pj[b]] * fd.ious[a][b]);
      const auto row_to_col = solve_square_assignment(costs, n);
      for (int a = 0; a < r; ++a) {
        const int b = row_to_col[a];
        if (b < 0 || b >= c) continue;
        const double ov = fd.ious[a][b];
        if (ov >= alpha - 1e-12) {
          ++tp;
          loc_sum += ov;
          matches_count[{fd.gi[a], fd.pj[b]}] += 1;
        }
      }
    }
    row.tp = tp;
    row.fn = gt_total - tp;
    row.fp = pred_total - tp;
    row.loc_sum = loc_sum;
    for (const auto& [pair, m] : matches_count) {
      const double denom = double(gt_count[pair.first] + pred_count[pair.second]) - double(m);
      row.ass_sum += double(m) * (denom > 0 ? double(m) / denom : 0.0);
    }
    const long det_denom = row.tp + row.fn + row.fp;
    row.deta = det_denom > 0 ? double(row.tp) / double(det_denom) : 1.0;
    row.assa = row.tp > 0 ? row.ass_sum / double(row.tp) : (det_denom > 0 ? 0.0 : 1.0);
    row.loca = row.tp > 0 ? row.loc_sum / double(row.tp) : 1.0;
    row.hota = std::sqrt(row.deta * row.assa);
  }

  for (const auto& row : result.alphas) {
    result.hota += row.hota;
    result.deta += row.deta;
    result.assa += row.assa;
    result.loca += row.loca;
  }
  result.hota /= 19.0;
  result.deta /= 19.0;
  result.assa /= 19.0;
  result.loca /= 19.0;
  return result;
}

// ---------------------------------------------------------------------------
// Combined report

struct MetricsReport {
  ClearResult clear;
  IdResult id;
  HotaResult hota;
  long frames_skipped = 0;
  long n_frames = 0;
  double skip_pct = 0.0;
  double total_time = 0.0;
  double speedup = 0.0;
};

inline MetricsReport evaluate(const TrackedSequence& gt, const TrackedSequence& pred,
                              double clear_iou_threshold = 0.5, double id_iou_threshold = 0.5) {
  MetricsReport r;
  r.clear = clear_metrics(gt, pred, clear_iou_threshold);
  r.id = id_metrics(gt, pred, id_iou_threshold);
  r.hota = hota(gt, pred);
  return r;
}

// Pools raw counts across sequences (MOTChallenge convention): summed TP/FP/
// FN/IDSW/ID counts and per-alpha HOTA counts, metrics recomputed from sums.
inline MetricsReport aggregate_reports(const std::vector<MetricsReport>& reports) {
  MetricsReport agg;
  agg.hota.alphas.resize(19);
  for (int ai = 0; ai < 19; ++ai) agg.hota.alphas[ai].alpha = double(ai + 1) / 20.0;
  for (const auto& r : reports) {
    agg.clear.tp += r.clear.tp;
    agg.clear.fp += r.clear.fp;
    agg.clear.fn += r.clear.fn;
    agg.clear.idsw += r.clear.idsw;
    agg.clear.gt_total += r.clear.gt_total;
    agg.clear.iou_sum += r.clear.iou_sum;
    agg.id.idtp += r.id.idtp;
    agg.id.idfp += r.id.idfp;
    agg.id.idfn += r.id.idfn;
    for (int ai = 0; ai < 19; ++ai) {
      auto& a = agg.hota.alphas[ai];
      const auto& b = r.hota.alphas[ai];
      a.tp += b.tp;
      a.fn += b.fn;
      a.fp += b.fp;
      a.loc_sum += b.loc_sum;
      a.ass_sum += b.ass_sum;
    }
    agg.frames_skipped += r.frames_skipped;
    agg.n_frames += r.n_frames;
    agg.total_time += r.total_time;
  }
  if (agg.clear.gt_total > 0)
    agg.clear.mota =
        1.0 - double(agg.clear.fn + agg.clear.fp + agg.clear.idsw) / double(agg.clear.gt_total);
  agg.clear.motp = agg.clear.tp > 0 ? agg.clear.iou_sum / double(agg.clear.tp) : 0.0;
  {
    const long idtp = agg.id.idtp;
    const double denom = double(2 * idtp + agg.id.idfp + agg.id.idfn);
    agg.id.idf1 = denom > 0 ? 2.0 * double(idtp) / denom : 1.0;
    agg.id.idp = (idtp + agg.id.idfp) > 0 ? double(idtp) / double(idtp + agg.id.idfp) : 0.0;
    agg.id.idr = (idtp + agg.id.idfn) > 0 ? double(idtp) / double(idtp + agg.id.idfn) : 0.0;
  }
  agg.hota.hota = agg.hota.deta = agg.hota.assa = agg.hota.loca = 0.0;
  for (auto& a : agg.hota.alphas) {
    const long det_denom = a.tp + a.fn + a.fp;
    a.deta = det_denom > 0 ? double(a.tp) / double(det_denom) : 1.0;
    a.assa = a.tp > 0 ? a.ass_sum / double(a.tp) : (det_denom > 0 ? 0.0 : 1.0);
    a.loca = a.tp > 0 ? a.loc_sum / double(a.tp) : 1.0;
    a.hota = std::sqrt(a.deta * a.assa);
    agg.hota.hota += a.hota;
    agg.hota.deta += a.deta;
    agg.hota.assa += a.assa;
    agg.hota.loca += a.loca;
  }
  agg.hota.hota /= 19.0;
  agg.hota.deta /= 19.0;
  agg.hota.assa /= 19.0;
  agg.hota.loca /= 19.0;
  if (agg.n_frames > 0) agg.skip_pct = 100.0 * double(agg.frames_skipped) / double(agg.n_frames);
  return agg;
}

}  // namespace emo
