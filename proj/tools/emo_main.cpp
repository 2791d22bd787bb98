// emo: multi-object tracking with adaptive detection skipping.
// Subcommands: track (run a policy over sequences), eval (score results
// against ground truth), sweep (grid over one parameter), report (pretty-print
// an eval run).

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "emo/emo.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Logging, controlled by EMO_LOG (debug | info | warn | quiet)

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Quiet = 3 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("EMO_LOG");
    if (!env) return LogLevel::Info;
    const std::string v = env;
    if (v == "debug") return LogLevel::Debug;
    if (v == "warn") return LogLevel::Warn;
    if (v == "quiet") return LogLevel::Quiet;
    return LogLevel::Info;
  }();
  return level;
}

std::mutex g_log_mutex;

void log_at(LogLevel lvl, const std::string& msg) {
  if (lvl < log_level()) return;
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::cerr << msg << "\n";
}

void log_debug(const std::string& msg) { log_at(LogLevel::Debug, "[debug] " + msg); }
void log_info(const std::string& msg) { log_at(LogLevel::Info, msg); }

// ---------------------------------------------------------------------------
// Shared option bundle

struct Options {
  std::string data;
  std::string seqs;  // comma-separated filter, empty = all
  std::string out;

  std::string policy = "noskip";
  std::string pattern;
  int omega = 2;
  std::string measure = "ncc";
  double ncc_threshold = 0.75;
  double hog_threshold = 0.85;
  double eigen_threshold = 100.0;
  std::string eigen_agg = "mean";
  int k = 0;  // 0 = derive from sequence fps
  std::string skip_box_source = "kalman";

  std::string det_source = "file";
  double oracle_sigma = 0.0;
  double oracle_drop = 0.0;
  double oracle_fp = 0.0;

  std::string cost_profile = "mot17";
  uint64_t seed = 0;
  int jobs = 1;
};

void add_data_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--data", opt.data, "Dataset root containing sequence directories")->required();
  cmd->add_option("--seqs", opt.seqs, "Comma-separated sequence names (default: all)");
}

void add_run_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--policy", opt.policy, "Skip policy")
      ->check(CLI::IsMember({"noskip", "periodic", "alternate", "context-aware"}));
  cmd->add_option("--pattern", opt.pattern, "Periodic D/S pattern, overrides --omega");
  cmd->add_option("--omega", opt.omega, "Periodic: detect 1 of every omega frames")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--measure", opt.measure, "Similarity measure for context-aware")
      ->check(CLI::IsMember({"ncc", "hog", "eigen"}));
  cmd->add_option("--ncc-threshold", opt.ncc_threshold, "Skip when NCC >= threshold");
  cmd->add_option("--hog-threshold", opt.hog_threshold, "Skip when HOG cosine >= threshold");
  cmd->add_option("--eigen-threshold", opt.eigen_threshold, "Skip when eigenvalue <= threshold");
  cmd->add_option("--eigen-agg", opt.eigen_agg, "Eigenvalue aggregation across tracks")
      ->check(CLI::IsMember({"mean", "sum"}));
  cmd->add_option("--k", opt.k, "Forced detection cadence (0 = fps/5)");
  cmd->add_option("--skip-box-source", opt.skip_box_source, "Box emitted on skipped frames")
      ->check(CLI::IsMember({"reuse", "kalman"}));
  cmd->add_option("--det-source", opt.det_source, "Detections from det.txt or a GT oracle")
      ->check(CLI::IsMember({"file", "oracle"}));
  cmd->add_option("--oracle-sigma", opt.oracle_sigma, "Oracle box jitter sigma in pixels");
  cmd->add_option("--oracle-drop", opt.oracle_drop, "Oracle per-box drop probability");
  cmd->add_option("--oracle-fp", opt.oracle_fp, "Oracle false positive rate");
  cmd->add_option("--cost-profile", opt.cost_profile, "Latency profile")
      ->check(CLI::IsMember({"mot17", "mot15"}));
  cmd->add_option("--seed", opt.seed, "Oracle RNG seed");
  cmd->add_option("--jobs", opt.jobs, "Sequences processed concurrently")
      ->check(CLI::PositiveNumber);
}

json options_json(const Options& opt) {
  json j;
  j["data"] = opt.data;
  j["seqs"] = opt.seqs;
  j["out"] = opt.out;
  j["policy"] = opt.policy;
  j["pattern"] = opt.pattern;
  j["omega"] = opt.omega;
  j["measure"] = opt.measure;
  j["ncc_threshold"] = opt.ncc_threshold;
  j["hog_threshold"] = opt.hog_threshold;
  j["eigen_threshold"] = opt.eigen_threshold;
  j["eigen_agg"] = opt.eigen_agg;
  j["k"] = opt.k;
  j["skip_box_source"] = opt.skip_box_source;
  j["det_source"] = opt.det_source;
  j["oracle_sigma"] = opt.oracle_sigma;
  j["oracle_drop"] = opt.oracle_drop;
  j["oracle_fp"] = opt.oracle_fp;
  j["cost_profile"] = opt.cost_profile;
  j["seed"] = opt.seed;
  j["jobs"] = opt.jobs;
  return j;
}

// ---------------------------------------------------------------------------
// Config -> library structures

emo::SimilarityConfig similarity_config(const Options& opt) {
  emo::SimilarityConfig sim;
  if (opt.measure == "ncc") sim.measure = emo::SimilarityMeasure::NCC;
  else if (opt.measure == "hog") sim.measure = emo::SimilarityMeasure::HOG;
  else sim.measure = emo::SimilarityMeasure::Eigenvalue;
  sim.ncc_threshold = opt.ncc_threshold;
  sim.hog_threshold = opt.hog_threshold;
  sim.eigen_threshold = opt.eigen_threshold;
  sim.eigen_agg = opt.eigen_agg == "sum" ? emo::EigenAggregation::Sum : emo::EigenAggregation::Mean;
  return sim;
}

emo::SkipPolicy make_policy(const Options& opt, double fps) {
  if (opt.policy == "noskip") return emo::SkipPolicy::no_skip();
  if (opt.policy == "alternate") return emo::SkipPolicy::alternate();
  if (opt.policy == "periodic") {
    if (!opt.pattern.empty()) return emo::SkipPolicy::periodic_pattern(opt.pattern);
    return emo::SkipPolicy::periodic(opt.omega);
  }
  const int k = opt.k > 0 ? opt.k : emo::default_forced_cadence(fps);
  return emo::SkipPolicy::context_aware(similarity_config(opt), k);
}

emo::CostProfile make_profile(const Options& opt) {
  return opt.cost_profile == "mot15" ? emo::CostProfile::mot15() : emo::CostProfile::mot17();
}

std::vector<std::string> discover_sequences(const Options& opt) {
  std::vector<std::string> wanted;
  if (!opt.seqs.empty()) {
    std::stringstream ss(opt.seqs);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) wanted.push_back(tok);
    }
    return wanted;
  }
  for (const auto& entry : fs::directory_iterator(opt.data))
    if (entry.is_directory() && fs::exists(entry.path() / "seqinfo.ini"))
      wanted.push_back(entry.path().filename().string());
  std::sort(wanted.begin(), wanted.end());
  if (wanted.empty()) throw emo::EmoError("no sequences found under " + opt.data);
  return wanted;
}

// Runs the configured policy over every requested sequence, up to --jobs at a
// time. Returns (sequence name, bundle, run output) triples in input order.
struct SequenceRun {
  std::string name;
  double fps = 0;
  int length = 0;
  emo::RunOutput output;
};

std::vector<SequenceRun> run_all(const Options& opt, const std::vector<std::string>& names) {
  std::vector<SequenceRun> runs(names.size());
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= names.size()) return;
      try {
        const auto seq = emo::load_sequence(fs::path(opt.data) / names[i]);
        log_debug("loaded " + names[i] + " (" + std::to_string(seq.length) + " frames)");

        std::unique_ptr<emo::DetectionSource> source;
        if (opt.det_source == "oracle") {
          emo::OracleConfig ocfg;
          ocfg.jitter_sigma = opt.oracle_sigma;
          ocfg.drop_probability = opt.oracle_drop;
          ocfg.false_positive_rate = opt.oracle_fp;
          ocfg.seed = opt.seed;
          source = std::make_unique<emo::OracleDetectionSource>(seq.ground_truth, seq.width,
                                                                seq.height, ocfg);
        } else {
          source = std::make_unique<emo::FileDetectionSource>(seq.detections_by_frame);
        }

        emo::RunOptions run_opt;
        run_opt.policy = make_policy(opt, seq.fps);
        run_opt.cost_profile = make_profile(opt);
        run_opt.box_source = opt.skip_box_source == "reuse" ? emo::SkipBoxSource::ReusePrevious
                                                            : emo::SkipBoxSource::KalmanEstimate;

        std::unique_ptr<emo::FrameProvider> frames;
        if (run_opt.policy.kind == emo::PolicyKind::ContextAware)
          frames = std::make_unique<emo::DirectoryFrameProvider>(seq.frame_paths);

        runs[i].name = names[i];
        runs[i].fps = seq.fps;
        runs[i].length = seq.length;
        runs[i].output = emo::run_sequence(seq.length, frames.get(), *source, run_opt);
        log_info(names[i] + ": " + std::to_string(runs[i].output.ledger.n_skipped) + "/" +
                 std::to_string(seq.length) + " frames skipped, speedup " +
                 std::to_string(runs[i].output.ledger.speedup_vs_noskip));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(opt.jobs, (int)names.size()));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return runs;
}

void write_cost_ledger(const fs::path& path, const std::vector<SequenceRun>& runs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw emo::EmoError("cannot open for write: " + path.string());
  out << "sequence,n_frames,n_detected,n_skipped,total_time_s,speedup\n";
  char buf[64];
  for (const auto& r : runs) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f", r.output.ledger.total_time,
                  r.output.ledger.speedup_vs_noskip);
    out << r.name << ',' << r.output.ledger.n_frames << ',' << r.output.ledger.n_detected << ','
        << r.output.ledger.n_skipped << ',' << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// track

int cmd_track(const Options& opt) {
  fs::create_directories(opt.out);
  const auto names = discover_sequences(opt);
  const auto runs = run_all(opt, names);

  for (const auto& r : runs) {
    emo::write_results_file((fs::path(opt.out) / (r.name + ".txt")).string(), r.output.rows);
    std::ofstream dec(fs::path(opt.out) / (r.name + "_decisions.csv"), std::ios::binary);
    emo::write_decision_log(dec, r.output.decisions);
  }
  write_cost_ledger(fs::path(opt.out) / "cost_ledger.csv", runs);
  std::ofstream cfg(fs::path(opt.out) / "config.json", std::ios::binary);
  cfg << options_json(opt).dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct LedgerRow {
  long n_frames = 0, n_detected = 0, n_skipped = 0;
  double total_time = 0, speedup = 0;
};

std::map<std::string, LedgerRow> read_cost_ledger(const fs::path& path) {
  std::map<std::string, LedgerRow> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string name, tok;
    std::getline(ss, name, ',');
    LedgerRow row;
    std::getline(ss, tok, ',');
    row.n_frames = std::stol(tok);
    std::getline(ss, tok, ',');
    row.n_detected = std::stol(tok);
    std::getline(ss, tok, ',');
    row.n_skipped = std::stol(tok);
    std::getline(ss, tok, ',');
    row.total_time = std::stod(tok);
    std::getline(ss, tok, ',');
    row.speedup = std::stod(tok);
    out[name] = row;
  }
  return out;
}

json report_json(const std::string& name, const emo::MetricsReport& r) {
  json j;
  j["Sequence"] = name;
  j["MOTA"] = r.clear.mota ? json(*r.clear.mota) : json();
  j["MOTP"] = r.clear.motp;
  j["MOTP_dist"] = 1.0 - r.clear.motp;  // the distance-style presentation
  j["IDF1"] = r.id.idf1;
  j["IDP"] = r.id.idp;
  j["IDR"] = r.id.idr;
  j["IDSW"] = r.clear.idsw;
  j["HOTA"] = r.hota.hota;
  j["DetA"] = r.hota.deta;
  j["AssA"] = r.hota.assa;
  j["LocA"] = r.hota.loca;
  j["FramesSkipped"] = r.frames_skipped;
  j["SkipPct"] = r.skip_pct;
  j["TotalTime"] = r.total_time;
  j["Speedup"] = r.speedup;
  return j;
}

const char* kMetricsHeader =
    "MOTA,MOTP,MOTP_dist,IDF1,IDP,IDR,IDSW,HOTA,DetA,AssA,LocA,"
    "FramesSkipped,SkipPct,TotalTime,Speedup";

void append_metrics_csv(std::ostream& out, const emo::MetricsReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%ld,%.6f,%.6f,%.6f,%.6f,%ld,%.2f,%.6f,%.6f\n",
                r.clear.mota.value_or(0.0), r.clear.motp, 1.0 - r.clear.motp, r.id.idf1, r.id.idp,
                r.id.idr, r.clear.idsw, r.hota.hota, r.hota.deta, r.hota.assa, r.hota.loca,
                r.frames_skipped, r.skip_pct, r.total_time, r.speedup);
  out << buf;
}

void print_report_table(std::ostream& out, const std::vector<std::pair<std::string, json>>& rows) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%-18s %7s %7s %7s %7s %6s %7s %7s %7s %7s  %s\n", "Sequence",
                "MOTA", "MOTP", "IDF1", "IDSW", "HOTA", "DetA", "AssA", "LocA", "Speedup",
                "#Frames Skipped : %");
  out << buf;
  for (const auto& [name, j] : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%-18s %7.4f %7.4f %7.4f %7ld %6.4f %7.4f %7.4f %7.4f %7.4f  %ld : %.1f%%\n",
                  name.c_str(), j["MOTA"].is_null() ? 0.0 : j["MOTA"].get<double>(),
                  j["MOTP"].get<double>(), j["IDF1"].get<double>(), j["IDSW"].get<long>(),
                  j["HOTA"].get<double>(), j["DetA"].get<double>(), j["AssA"].get<double>(),
                  j["LocA"].get<double>(), j["Speedup"].get<double>(),
                  j["FramesSkipped"].get<long>(), j["SkipPct"].get<double>());
    out << buf;
  }
}

int cmd_eval(const Options& opt, const std::string& run_dir) {
  const auto names = discover_sequences(opt);
  const auto ledger = read_cost_ledger(fs::path(run_dir) / "cost_ledger.csv");

  std::vector<emo::MetricsReport> reports;
  std::vector<std::pair<std::string, json>> rows;
  std::ofstream csv(fs::path(run_dir) / "metrics.csv", std::ios::binary);
  csv << "Sequence," << kMetricsHeader << '\n';

  for (const auto& name : names) {
    const auto seq = emo::load_sequence(fs::path(opt.data) / name);
    if (!seq.has_ground_truth()) throw emo::NoGroundTruth();
    const auto pred = emo::read_results_file((fs::path(run_dir) / (name + ".txt")).string());
    auto report = emo::evaluate(emo::to_tracked(seq.ground_truth), emo::to_tracked(pred));
    if (auto it = ledger.find(name); it != ledger.end()) {
      report.frames_skipped = it->second.n_skipped;
      report.n_frames = it->second.n_frames;
      report.skip_pct =
          it->second.n_frames > 0 ? 100.0 * it->second.n_skipped / it->second.n_frames : 0.0;
      report.total_time = it->second.total_time;
      report.speedup = it->second.speedup;
    }
    reports.push_back(report);
    rows.emplace_back(name, report_json(name, report));
    csv << name << ',';
    append_metrics_csv(csv, report);
  }

  auto agg = emo::aggregate_reports(reports);
  {
    // pooled speedup: total simulated time over the pooled no-skip baseline
    double baseline = 0;
    const auto profile = make_profile(opt);
    baseline = double(agg.n_frames) * profile.t_detection;
    agg.speedup = baseline > 0 ? agg.total_time / baseline : 0.0;
  }
  rows.emplace_back("AGGREGATE", report_json("AGGREGATE", agg));
  csv << "AGGREGATE,";
  append_metrics_csv(csv, agg);

  json all = json::array();
  for (const auto& [name, j] : rows) all.push_back(j);
  std::ofstream jf(fs::path(run_dir) / "metrics.json", std::ios::binary);
  jf << all.dump(2) << '\n';

  print_report_table(std::cout, rows);
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(Options opt, const std::string& param, const std::string& values_csv,
              const std::string& out_csv) {
  std::vector<std::string> values;
  {
    std::stringstream ss(values_csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) values.push_back(tok);
  }
  if (values.empty()) throw emo::EmoError("sweep grid is empty");

  const auto names = discover_sequences(opt);
  std::ofstream out(out_csv, std::ios::binary);
  if (!out) throw emo::EmoError("cannot open for write: " + out_csv);
  out << "param,value,Sequence,fps," << kMetricsHeader << '\n';

  for (const auto& value : values) {
    Options point = opt;
    if (param == "omega") {
      point.policy = "periodic";
      point.pattern.clear();
      point.omega = std::stoi(value);
    } else if (param == "pattern") {
      if (value == "none") {
        point.policy = "noskip";
      } else {
        point.policy = "periodic";
        point.pattern = value;
      }
    } else if (param == "ncc-threshold") {
      point.policy = "context-aware";
      point.measure = "ncc";
      point.ncc_threshold = std::stod(value);
    } else if (param == "hog-threshold") {
      point.policy = "context-aware";
      point.measure = "hog";
      point.hog_threshold = std::stod(value);
    } else if (param == "eigen-threshold") {
      point.policy = "context-aware";
      point.measure = "eigen";
      point.eigen_threshold = std::stod(value);
    } else if (param == "k") {
      point.policy = "context-aware";
      point.k = std::stoi(value);
    } else {
      throw emo::EmoError("unknown sweep parameter: " + param);
    }

    const auto runs = run_all(point, names);
    for (const auto& r : runs) {
      const auto seq = emo::load_sequence(fs::path(point.data) / r.name);
      if (!seq.has_ground_truth()) throw emo::NoGroundTruth();
      auto report = emo::evaluate(emo::to_tracked(seq.ground_truth), emo::to_tracked(r.output.rows));
      report.frames_skipped = r.output.ledger.n_skipped;
      report.n_frames = r.output.ledger.n_frames;
      report.skip_pct = 100.0 * double(r.output.ledger.n_skipped) / double(r.output.ledger.n_frames);
      report.total_time = r.output.ledger.total_time;
      report.speedup = r.output.ledger.speedup_vs_noskip;

      out << param << ',' << value << ',' << r.name << ',' << r.fps << ',';
      append_metrics_csv(out, report);
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const std::string& run_dir) {
  std::ifstream in(fs::path(run_dir) / "metrics.json");
  if (!in) throw emo::EmoError("no metrics.json under " + run_dir + " (run eval first)");
  json all = json::parse(in);
  std::vector<std::pair<std::string, json>> rows;
  for (auto& j : all) rows.emplace_back(j["Sequence"].get<std::string>(), j);
  print_report_table(std::cout, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-object tracking with adaptive detection skipping"};
  app.require_subcommand(1);

  Options opt;
  std::string run_dir, param, values, sweep_out;

  auto* track = app.add_subcommand("track", "Run a skip policy over sequences");
  add_data_flags(track, opt);
  add_run_flags(track, opt);
  track->add_option("--out", opt.out, "Output directory")->required();

  auto* eval = app.add_subcommand("eval", "Score a run directory against ground truth");
  add_data_flags(eval, opt);
  eval->add_option("--run", run_dir, "Run directory produced by track")->required();
  eval->add_option("--cost-profile", opt.cost_profile, "Latency profile for pooled speedup")
      ->check(CLI::IsMember({"mot17", "mot15"}));

  auto* sweep = app.add_subcommand("sweep", "Grid over one parameter, evaluated per point");
  add_data_flags(sweep, opt);
  add_run_flags(sweep, opt);
  sweep->add_option("--param", param, "omega | pattern | ncc-threshold | hog-threshold | eigen-threshold | k")
      ->required();
  sweep->add_option("--values", values, "Comma-separated grid values")->required();
  sweep->add_option("--out", sweep_out, "Output CSV path")->required();

  auto* report = app.add_subcommand("report", "Pretty-print a previously evaluated run");
  report->add_option("--run", run_dir, "Run directory with metrics.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (track->parsed()) return cmd_track(opt);
    if (eval->parsed()) return cmd_eval(opt, run_dir);
    if (sweep->parsed()) return cmd_sweep(opt, param, values, sweep_out);
    if (report->parsed()) return cmd_report(run_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
