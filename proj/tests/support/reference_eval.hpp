#pragma once

// Brute-force reference evaluator for CLEAR / ID / HOTA on small instances.
// Every matching is found by exhaustive enumeration of injective assignments
// instead of the Hungarian algorithm; association scores are recounted
// naively per true positive. Kept independent of emo/metrics.hpp internals
// on purpose: it only shares the input types and iou().

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "emo/core.hpp"
#include "emo/metrics.hpp"

namespace emo::testing {

// Enumerates all injective partial assignments rows -> cols (-1 = unassigned)
// and keeps the one maximizing `score` (first found wins ties).
inline std::vector<int> best_assignment(
    int rows, int cols, const std::function<double(const std::vector<int>&)>& score) {
  std::vector<int> current(rows, -1), best(rows, -1);
  std::vector<char> used(cols, 0);
  double best_score = -1e300;
  std::function<void(int)> rec = [&](int r) {
    if (r == rows) {
      const double s = score(current);
      if (s > best_score) {
        best_score = s;
        best = current;
      }
      return;
    }
    current[r] = -1;
    rec(r + 1);
    for (int c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      current[r] = c;
      rec(r + 1);
      current[r] = -1;
      used[c] = 0;
    }
  };
  rec(0);
  return best;
}

struct RefClear {
  std::optional<double> mota;
  double motp = 0.0;
  long idsw = 0;
  long tp = 0, fp = 0, fn = 0, gt_total = 0;
};

inline RefClear ref_clear_metrics(const TrackedSequence& gt, const TrackedSequence& pred,
                                  double iou_threshold = 0.5) {
  RefClear r;
  double iou_sum = 0.0;
  std::map<int, int> last_pred;

  std::vector<int> frames;
  for (const auto& [f, _] : gt) frames.push_back(f);
  for (const auto& [f, _] : pred) frames.push_back(f);
  std::sort(frames.begin(), frames.end());
  frames.erase(std::unique(frames.begin(), frames.end()), frames.end());

  static const std::vector<IdBox> kEmpty;
  for (int f : frames) {
    auto git = gt.find(f);
    auto pit = pred.find(f);
    const auto& g = git == gt.end() ? kEmpty : git->second;
    const auto& p = pit == pred.end() ? kEmpty : pit->second;
    r.gt_total += (long)g.size();

    std::vector<std::tuple<int, int, double>> matched;  // gt_id, pred_id, iou
    std::vector<char> g_used(g.size(), 0), p_used(p.size(), 0);

    // carry over previous pairings that still overlap, lowest gt id first
    std::vector<size_t> order(g.size());
    for (size_t i = 0; i < g.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return g[a].id < g[b].id; });
    for (size_t gi : order) {
      auto it = last_pred.find(g[gi].id);
      if (it == last_pred.end()) continue;
      for (size_t pj = 0; pj < p.size(); ++pj) {
        if (p_used[pj] || p[pj].id != it->second) continue;
        const double ov = iou(g[gi].box, p[pj].box);
        if (ov >= iou_threshold) {
          matched.emplace_back(g[gi].id, p[pj].id, ov);
          g_used[gi] = 1;
          p_used[pj] = 1;
        }
        break;
      }
    }

    std::vector<size_t> g_rem, p_rem;
    for (size_t i = 0; i < g.size(); ++i)
      if (!g_used[i]) g_rem.push_back(i);
    for (size_t j = 0; j < p.size(); ++j)
      if (!p_used[j]) p_rem.push_back(j);

    // exhaustive: maximize match count first, then total IoU
    const auto assign = best_assignment(
        (int)g_rem.size(), (int)p_rem.size(), [&](const std::vector<int>& a) {
          int count = 0;
          double total = 0;
          for (size_t i = 0; i < a.size(); ++i) {
            if (a[i] < 0) continue;
            const double ov = iou(g[g_rem[i]].box, p[p_rem[a[i]]].box);
            if (ov < iou_threshold) return -1e300;  // invalid pairing
            ++count;
            total += ov;
          }
          return count * 1000.0 + total;
        });
    for (size_t i = 0; i < assign.size(); ++i) {
      if (assign[i] < 0) continue;
      const auto& gb = g[g_rem[i]];
      const auto& pb = p[p_rem[assign[i]]];
      matched.emplace_back(gb.id, pb.id, iou(gb.box, pb.box));
    }

    r.tp += (long)matched.size();
    r.fn += (long)g.size() - (long)matched.size();
    r.fp += (long)p.size() - (long)matched.size();
    std::sort(matched.begin(), matched.end());
    for (const auto& [gid, pid, ov] : matched) {
      iou_sum += ov;
      auto it = last_pred.find(gid);
      if (it != last_pred.end() && it->second != pid) ++r.idsw;
      last_pred[gid] = pid;
    }
  }
  r.motp = r.tp > 0 ? iou_sum / double(r.tp) : 0.0;
  if (r.gt_total > 0) r.mota = 1.0 - double(r.fn + r.fp + r.idsw) / double(r.gt_total);
  return r;
}

struct RefId {
  double idf1 = 0.0, idp = 0.0, idr = 0.0;
  long idtp = 0;
};

inline RefId ref_id_metrics(const TrackedSequence& gt, const TrackedSequence& pred,
                            double iou_threshold = 0.5) {
  std::map<int, long> gt_len, pred_len;
  std::map<std::pair<int, int>, long> m;
  for (const auto& [f, boxes] : gt)
    for (const auto& b : boxes) gt_len[b.id] += 1;
  for (const auto& [f, boxes] : pred)
    for (const auto& b : boxes) pred_len[b.id] += 1;
  for (const auto& [f, gboxes] : gt) {
    auto pit = pred.find(f);
    if (pit == pred.end()) continue;
    for (const auto& gb : gboxes)
      for (const auto& pb : pit->second)
        if (iou(gb.box, pb.box) >= iou_threshold) m[{gb.id, pb.id}] += 1;
  }
  std::vector<int> gids, pids;
  for (const auto& [id, _] : gt_len) gids.push_back(id);
  for (const auto& [id, _] : pred_len) pids.push_back(id);

  const auto assign = best_assignment(
      (int)gids.size(), (int)pids.size(), [&](const std::vector<int>& a) {
        double idtp = 0;
        for (size_t i = 0; i < a.size(); ++i) {
          if (a[i] < 0) continue;
          auto it = m.find({gids[i], pids[a[i]]});
          if (it != m.end()) idtp += double(it->second);
        }
        return idtp;
      });
  long idtp = 0;
  for (size_t i = 0; i < assign.size(); ++i) {
    if (assign[i] < 0) continue;
    auto it = m.find({gids[i], pids[assign[i]]});
    if (it != m.end()) idtp += it->second;
  }
  long total_gt = 0, total_pred = 0;
  for (const auto& [_, n] : gt_len) total_gt += n;
  for (const auto& [_, n] : pred_len) total_pred += n;

  RefId r;
  r.idtp = idtp;
  r.idp = total_pred > 0 ? double(idtp) / double(total_pred) : 0.0;
  r.idr = total_gt > 0 ? double(idtp) / double(total_gt) : 0.0;
  const double denom = double(total_gt + total_pred);
  r.idf1 = denom > 0 ? 2.0 * double(idtp) / denom : 1.0;
  return r;
}

struct RefHota {
  double hota = 0, deta = 0, assa = 0, loca = 0;
  std::vector<double> hota_alpha;  // 19 values
};

inline RefHota ref_hota(const TrackedSequence& gt, const TrackedSequence& pred) {
  std::vector<int> frames;
  for (const auto& [f, _] : gt) frames.push_back(f);
  for (const auto& [f, _] : pred) frames.push_back(f);
  std::sort(frames.begin(), frames.end());
  frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
  static const std::vector<IdBox> kEmpty;
  auto at = [](const TrackedSequence& s, int f) -> const std::vector<IdBox>& {
    auto it = s.find(f);
    return it == s.end() ? kEmpty : it->second;
  };

  std::map<int, long> gt_count, pred_count;
  long gt_total = 0, pred_total = 0;
  for (int f : frames) {
    for (const auto& b : at(gt, f)) {
      gt_count[b.id] += 1;
      ++gt_total;
    }
    for (const auto& b : at(pred, f)) {
      pred_count[b.id] += 1;
      ++pred_total;
    }
  }

  // soft co-occurrence and global alignment, written out longhand
  std::map<std::pair<int, int>, double> potential;
  for (int f : frames) {
    const auto& g = at(gt, f);
    const auto& p = at(pred, f);
    for (const auto& gb : g) {
      for (const auto& pb : p) {
        const double s = iou(gb.box, pb.box);
        if (s <= 0) continue;
        double row_sum = 0, col_sum = 0;
        for (const auto& pb2 : p) row_sum += iou(gb.box, pb2.box);
        for (const auto& gb2 : g) col_sum += iou(gb2.box, pb.box);
        potential[{gb.id, pb.id}] += s / (row_sum + col_sum - s);
      }
    }
  }
  auto alignment = [&](int gid, int pid) {
    auto it = potential.find({gid, pid});
    const double pot = it == potential.end() ? 0.0 : it->second;
    const double denom = double(gt_count[gid] + pred_count[pid]) - pot;
    return denom > 0 ? pot / denom : 0.0;
  };

  RefHota r;
  for (int ai = 1; ai <= 19; ++ai) {
    const double alpha = double(ai) / 20.0;
    struct Tp {
      int gid, pid;
      double ov;
    };
    std::vector<Tp> tps;
    for (int f : frames) {
      const auto& g = at(gt, f);
      const auto& p = at(pred, f);
      if (g.empty() || p.empty()) continue;
      const auto assign = best_assignment(
          (int)g.size(), (int)p.size(), [&](const std::vector<int>& a) {
            double total = 0;
            for (size_t i = 0; i < a.size(); ++i)
              if (a[i] >= 0) total += alignment(g[i].id, p[a[i]].id) * iou(g[i].box, p[a[i]].box);
            return total;
          });
      for (size_t i = 0; i < assign.size(); ++i) {
        if (assign[i] < 0) continue;
        const double ov = iou(g[i].box, p[assign[i]].box);
        if (ov >= alpha - 1e-12) tps.push_back({g[i].id, p[assign[i]].id, ov});
      }
    }

    const long tp = (long)tps.size();
    const long fn = gt_total - tp, fp = pred_total - tp;
    double ass_sum = 0, loc_sum = 0;
    for (const auto& c : tps) {
      long tpa = 0;
      for (const auto& c2 : tps)
        if (c2.gid == c.gid && c2.pid == c.pid) ++tpa;
      const long fna = gt_count[c.gid] - tpa;
      const long fpa = pred_count[c.pid] - tpa;
      ass_sum += double(tpa) / double(tpa + fna + fpa);
      loc_sum += c.ov;
    }
    const long det_denom = tp + fn + fp;
    const double deta = det_denom > 0 ? double(tp) / double(det_denom) : 1.0;
    const double assa = tp > 0 ? ass_sum / double(tp) : (det_denom > 0 ? 0.0 : 1.0);
    const double loca = tp > 0 ? loc_sum / double(tp) : 1.0;
    const double h = std::sqrt(deta * assa);
    r.hota_alpha.push_back(h);
    r.hota += h;
    r.deta += deta;
    r.assa += assa;
    r.loca += loca;
  }
  r.hota /= 19.0;
  r.deta /= 19.0;
  r.assa /= 19.0;
  r.loca /= 19.0;
  return r;
}

// ---------------------------------------------------------------------------
// Random instance generator for oracle-equivalence checks.

struct RandomInstance {
  TrackedSequence gt;
  TrackedSequence pred;
};

inline RandomInstance random_instance(uint64_t seed, int max_objects = 4, int max_frames = 20) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (double(rng() >> 11) / 9007199254740992.0);
  };
  RandomInstance inst;
  const int n_obj = 1 + int(rng() % max_objects);
  const int n_frames = 5 + int(rng() % (max_frames - 4));
  for (int i = 0; i < n_obj; ++i) {
    const int gid = i + 1;
    const int entry = 1 + int(rng() % n_frames);
    const int exit = std::min(n_frames, entry + 3 + int(rng() % n_frames));
    const double x = uni(0, 200), y = uni(0, 150);
    const double vx = uni(-4, 4), vy = uni(-3, 3);
    const double w = uni(12, 40), h = uni(20, 60);
    // prediction id may flip mid-track, drop frames, or jitter off target
    const int flip_at = (rng() % 3 == 0) ? entry + int(rng() % 8) : INT_MAX;
    const int pid_a = 100 + i * 2, pid_b = 101 + i * 2;
    for (int f = entry; f <= exit; ++f) {
      const double t = f - entry;
      BoundingBox gb{x + vx * t, y + vy * t, w, h};
      inst.gt[f].push_back({gid, gb});
      if (rng() % 10 == 0) continue;  // missed detection
      BoundingBox pb{gb.left + uni(-6, 6), gb.top + uni(-6, 6), w + uni(-4, 4), h + uni(-4, 4)};
      inst.pred[f].push_back({f >= flip_at ? pid_b : pid_a, pb});
    }
  }
  // a few stray false positives
  const int n_fp = int(rng() % 4);
  for (int i = 0; i < n_fp; ++i) {
    const int f = 1 + int(rng() % n_frames);
    inst.pred[f].push_back({200 + i, {uni(0, 250), uni(0, 180), uni(10, 30), uni(15, 50)}});
  }
  return inst;
}

}  // namespace emo::testing
