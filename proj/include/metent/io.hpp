#pragma once

// Serialisation: JSON for functions, families and reports, CSV tables, and a
// small hand-written SVG log-log plot. Doubles that must round-trip are
// written as "%.17g" decimal strings.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "metent/convex_function.hpp"
#include "metent/metrics.hpp"
#include "metent/packing.hpp"
#include "metent/schedule.hpp"
#include "metent/verify.hpp"

namespace metent::io {

using Json = nlohmann::ordered_json;

/// "%.17g"; parses back to the same double.
std::string exact_decimal(double x);
double parse_decimal(const std::string& s);

/// {"domain": {"lo": [...], "hi": [...]}, "form": {"kind": ..., ...}}
Json to_json(const ConvexFunction& f);
ConvexFunction function_from_json(const Json& j);

Json to_json(const DistanceReport& r);
Json to_json(const packing::PackingFamily& fam, bool include_functions = true);
Json to_json(const schedule::ScheduleReport& r);
Json to_json(const verify::InequalityReport& r);
Json empty_schedule_json(double log_eta, double p, double log_u);

/// Columns: i,j,hamming,l1_distance,bound,margin,pass
void write_certificate_csv(std::ostream& os, const packing::PackingCertificate& cert);
/// Columns: eta,k,epsilon,log_m,log_m_eps_scaled
void write_curve_csv(std::ostream& os, const std::vector<packing::CurvePoint>& curve, std::size_t d);
/// Columns: m,log_delta,log_alpha,log_zeta,ratio,ratio_pass,zeta_le_one
void write_schedule_csv(std::ostream& os, const schedule::ScheduleReport& r);
/// Columns: name,lhs,rhs,slack,tolerance,pass
void write_summary_csv(std::ostream& os, const std::vector<verify::InequalityReport>& reports);
/// One compact JSON object per line.
void write_jsonl(std::ostream& os, const std::vector<verify::InequalityReport>& reports);

struct PlotSeries {
  std::vector<double> x;  // positive
  std::vector<double> y;  // positive
};

/// Log-log scatter with a reference line of the given slope through the
/// geometric centre of the points. Point and tick labels use "%.6g".
std::string loglog_svg(const PlotSeries& pts, double ref_slope, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel);

/// "%.6g"
std::string short_decimal(double x);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::string& path, const std::string& content);

}  // namespace metent::io
