#include "qlab/report.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qlab/common.hpp"

namespace qlab {

namespace {

using nlohmann::json;

// JSON cannot carry non-finite numbers; encode them as tagged strings so
// the body stays deterministic and lossless.
json encode_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json record_to_json(const CheckRecord& r) {
  json j;
  j["id"] = r.id;
  j["claim"] = r.claim;
  j["estimate"] = encode_double(r.estimate);
  j["std_error"] = encode_double(r.std_error);
  j["bound"] = encode_double(r.bound);
  j["verdict"] = r.verdict;
  j["note"] = r.note;
  return j;
}

json series_to_json(const PlotSeries& s) {
  json j;
  j["kind"] = s.kind;
  j["name"] = s.name;
  j["loglog"] = s.loglog;
  j["columns"] = s.columns;
  json rows = json::array();
  for (const auto& row : s.rows) {
    json r = json::array();
    for (double v : row) r.push_back(encode_double(v));
    rows.push_back(r);
  }
  j["rows"] = rows;
  if (s.kind == "slope") {
    j["fit_slope"] = encode_double(s.fit_slope);
    j["fit_intercept"] = encode_double(s.fit_intercept);
  }
  return j;
}

json body_to_json(const ExperimentReport& report) {
  json body;
  body["suite"] = report.suite;
  body["artifact_version"] = report.artifact_version;
  body["generator_id"] = report.generator_id;
  body["seed"] = report.seed;
  body["quick"] = report.quick;
  body["config"] =
      report.config_snapshot.empty()
          ? json(nullptr)
          : json::parse(report.config_snapshot, nullptr, false);

  std::vector<const CheckRecord*> sorted;
  sorted.reserve(report.records.size());
  for (const auto& r : report.records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const CheckRecord* a, const CheckRecord* b) {
                     return a->id < b->id;
                   });
  json records = json::array();
  for (const CheckRecord* r : sorted) records.push_back(record_to_json(*r));
  body["records"] = records;

  std::vector<const PlotSeries*> series;
  for (const auto& s : report.series) series.push_back(&s);
  std::stable_sort(series.begin(), series.end(),
                   [](const PlotSeries* a, const PlotSeries* b) {
                     return a->name < b->name;
                   });
  json js = json::array();
  for (const PlotSeries* s : series) js.push_back(series_to_json(*s));
  body["series"] = js;
  return body;
}

std::string sanitize_stem(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '_' || c == '.')
               ? c
               : '_';
  return out.empty() ? std::string("series") : out;
}

}  // namespace

CheckRecord make_record(const std::string& id, const std::string& claim,
                        double estimate, double std_error, double bound,
                        bool pass) {
  CheckRecord r;
  r.id = id;
  r.claim = claim;
  r.estimate = estimate;
  r.std_error = std_error;
  r.bound = bound;
  r.verdict = pass ? "PASS" : "FAIL";
  return r;
}

CheckRecord skip_record(const std::string& id, const std::string& claim,
                        const std::string& reason) {
  CheckRecord r;
  r.id = id;
  r.claim = claim;
  r.verdict = "SKIP";
  r.note = reason;
  return r;
}

bool ExperimentReport::all_pass() const {
  for (const auto& r : records)
    if (r.verdict == "FAIL") return false;
  return true;
}

std::string report_body_json(const ExperimentReport& report) {
  // nlohmann objects iterate in key order, so dump() is canonical.
  return body_to_json(report).dump(2);
}

std::string write_report(const ExperimentReport& report,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);

  fs::path path;
  for (int seq = 0;; ++seq) {
    std::ostringstream name;
    name << report.suite << "-" << stamp;
    if (seq > 0) name << "-" << seq;
    name << ".json";
    path = fs::path(out_dir) / name.str();
    if (!fs::exists(path)) break;  // append-only: never overwrite
  }

  json file;
  file["body"] = body_to_json(report);
  file["meta"]["wall_seconds"] = encode_double(report.wall_seconds);
  file["meta"]["written_at"] = stamp;

  std::ofstream out(path);
  require(out.good(), "report: cannot open " + path.string());
  out << file.dump(2) << "\n";
  return path.string();
}

std::vector<std::string> emit_plot_data(const ExperimentReport& report,
                                        const std::string& kind,
                                        const std::string& out_dir) {
  require(kind == "slope" || kind == "sandwich" || kind == "spectrum",
          "emit_plot_data: unknown kind " + kind);
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::vector<std::string> written;
  for (const PlotSeries& s : report.series) {
    if (s.kind != kind) continue;
    const fs::path path =
        fs::path(out_dir) /
        (report.suite + "-" + sanitize_stem(s.name) + ".tsv");
    std::ofstream out(path);
    require(out.good(), "emit_plot_data: cannot open " + path.string());
    out << "# kind=" << s.kind << " loglog=" << (s.loglog ? 1 : 0);
    if (s.kind == "slope")
      out << " fit_slope=" << s.fit_slope
          << " fit_intercept=" << s.fit_intercept;
    out << "\n#";
    for (const auto& c : s.columns) out << " " << c;
    out << "\n";
    for (const auto& row : s.rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        out << (i ? "\t" : "") << row[i];
      out << "\n";
    }
    written.push_back(path.string());
  }
  require(!written.empty(),
          "emit_plot_data: report has no series of kind " + kind);
  return written;
}

}  // namespace qlab
