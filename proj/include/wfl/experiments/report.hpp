#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfl/detector.hpp"
#include "wfl/experiments/toml_subset.hpp"

namespace wfl::experiments {

enum class Status { Pass, Fail, Inconclusive };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

/// One checked claim: what was measured at which probe against which threshold.
struct Verdict {
  std::string name;
  std::string probe;
  std::string expected;
  std::string measured;
  std::string threshold;
  Status status = Status::Fail;

  nlohmann::json to_json() const {
    return {{"name", name},         {"probe", probe},         {"expected", expected},
            {"measured", measured}, {"threshold", threshold}, {"status", to_string(status)}};
  }
};

/// A fitted decay series tagged by probe, window and evaluation side
/// (static, flowed_full, flowed_free, flowed_frozen, fourier_cone).
struct FitRecord {
  std::string probe;
  std::string datum;  // canonical datum name in suite runs, else empty
  std::string side;
  DecayFit fit;

  std::string series() const { return (datum.empty() ? "" : datum + ":") + probe + ":" + side; }
};

struct RunReport {
  std::string scenario;
  std::string config_hash;
  std::string version;
  std::string timestamp;
  double wall_seconds = 0.0;
  std::vector<FitRecord> fits;
  std::vector<Verdict> verdicts;
  std::vector<std::string> warnings;
  nlohmann::json extra = nlohmann::json::object();
  std::string artifact_dir;

  std::size_t count(Status s) const {
    std::size_t n = 0;
    for (const auto& v : verdicts) n += v.status == s;
    return n;
  }

  /// 0 all pass, 2 any failure, 3 inconclusive without failures.
  int exit_code() const {
    if (count(Status::Fail) > 0) return 2;
    if (count(Status::Inconclusive) > 0) return 3;
    return 0;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["provenance"] = {{"config_hash", config_hash}, {"version", version}, {"timestamp", timestamp},
                       {"wall_seconds", wall_seconds}};
    auto& f = j["fits"] = nlohmann::json::array();
    for (const auto& r : fits) {
      auto e = r.fit.to_json();
      e["probe"] = r.probe;
      e["datum"] = r.datum;
      e["side"] = r.side;
      f.push_back(e);
    }
    auto& v = j["verdicts"] = nlohmann::json::array();
    for (const auto& x : verdicts) v.push_back(x.to_json());
    j["warnings"] = warnings;
    j["extra"] = extra;
    j["summary"] = {{"pass", count(Status::Pass)},
                    {"fail", count(Status::Fail)},
                    {"inconclusive", count(Status::Inconclusive)},
                    {"exit_code", exit_code()}};
    return j;
  }

  std::string summary() const {
    std::ostringstream os;
    os << "scenario " << scenario << " (config " << config_hash << ", wfl " << version << ")\n";
    for (const auto& w : warnings) os << "warning: " << w << '\n';
    for (const auto& v : verdicts) {
      os << std::left << std::setw(13) << ("[" + to_string(v.status) + "]") << v.name << " @ " << v.probe
         << ": measured " << v.measured;
      if (!v.expected.empty()) os << ", expected " << v.expected;
      os << " (" << v.threshold << ")\n";
    }
    os << count(Status::Pass) << " pass, " << count(Status::Fail) << " fail, " << count(Status::Inconclusive)
       << " inconclusive\n";
    return os.str();
  }
};

/// Plot table: per fit, one `point` row per rung (log2 lambda, log10 sup)
/// and one `fit` row carrying slope and intercept of
/// log10 sup = intercept + slope log10 lambda.
inline void emit_plotdata(const RunReport& report, std::ostream& os) {
  os << "series,window,kind,log2_lambda,log10_sup,slope,intercept\n";
  for (const auto& r : report.fits) {
    const auto& f = r.fit;
    for (std::size_t i = 0; i < f.lambda_values.size(); ++i) {
      os << r.series() << ',' << f.window << ",point,";
      detail::format_number(os, std::log2(f.lambda_values[i]));
      os << ',';
      detail::format_number(os, std::log10(f.sup_magnitudes[i]));
      os << ",,\n";
    }
    os << r.series() << ',' << f.window << ",fit,,,";
    detail::format_number(os, f.slope);
    os << ',';
    detail::format_number(os, f.intercept);
    os << '\n';
  }
}

inline void emit_plotdata(const RunReport& report, const std::filesystem::path& dir) {
  std::ofstream out(dir / "plotdata.csv", std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / "plotdata.csv").string());
  emit_plotdata(report, out);
}

/// Rung table of every fit: series, window, side, lambda, sup, clamped.
inline void write_fits_csv(const RunReport& report, std::ostream& os) {
  os << "series,window,side,lambda,sup,clamped\n";
  for (const auto& r : report.fits)
    for (std::size_t i = 0; i < r.fit.lambda_values.size(); ++i) {
      os << r.series() << ',' << r.fit.window << ',' << r.side << ',';
      detail::format_number(os, r.fit.lambda_values[i]);
      os << ',';
      detail::format_number(os, r.fit.sup_magnitudes[i]);
      os << ',' << (r.fit.clamped[i] ? 1 : 0) << '\n';
    }
}

/// Every sampled magnitude: series, window, lambda, x..., xi..., magnitude.
inline void write_points_csv(const RunReport& report, std::ostream& os) {
  std::size_t d = 0;
  for (const auto& r : report.fits)
    if (!r.fit.samples.empty()) {
      d = r.fit.samples.front().x.size();
      break;
    }
  os << "series,window,lambda";
  for (std::size_t a = 0; a < d; ++a) os << ",x" << a;
  for (std::size_t a = 0; a < d; ++a) os << ",xi" << a;
  os << ",magnitude\n";
  for (const auto& r : report.fits)
    for (const auto& s : r.fit.samples) {
      os << r.series() << ',' << r.fit.window << ',';
      detail::format_number(os, s.lambda);
      for (double v : s.x) {
        os << ',';
        detail::format_number(os, v);
      }
      for (double v : s.xi) {
        os << ',';
        detail::format_number(os, v);
      }
      os << ',';
      detail::format_number(os, s.magnitude);
      os << '\n';
    }
}

}  // namespace wfl::experiments
