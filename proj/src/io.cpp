#include "metent/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "metent/errors.hpp"

namespace metent::io {

std::string exact_decimal(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_decimal(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double parse_decimal(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ParameterError("parse_decimal: not a decimal number: '" + s + "'");
  return v;
}

namespace {

Json decimals(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(exact_decimal(x));
  return a;
}

std::vector<double> read_decimals(const Json& a) {
  std::vector<double> out;
  for (const auto& e : a) out.push_back(parse_decimal(e.get<std::string>()));
  return out;
}

Json affine_json(const form::Affine& a) {
  return Json{{"coeffs", decimals(a.coeffs)}, {"intercept", exact_decimal(a.intercept)}};
}

form::Affine read_affine(const Json& j) {
  return form::Affine{read_decimals(j.at("coeffs")), parse_decimal(j.at("intercept").get<std::string>())};
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Json to_json(const ConvexFunction& f) {
  Json form = std::visit(
      Overloaded{
          [](const form::Affine& a) {
            Json j{{"kind", "affine"}};
            j.update(affine_json(a));
            return j;
          },
          [](const form::MaxAffine& m) {
            Json pieces = Json::array();
            for (const auto& p : m.pieces) pieces.push_back(affine_json(p));
            return Json{{"kind", "max_affine"}, {"pieces", pieces}};
          },
          [](const form::SeparableQuadratic&) { return Json{{"kind", "separable_quadratic"}}; },
          [](const form::Hinge& h) {
            return Json{{"kind", "hinge"}, {"alpha", exact_decimal(h.alpha)}, {"axis", h.axis}};
          },
          [](const form::MaxWith& m) {
            Json parts = Json::array();
            for (const auto& p : m.parts) parts.push_back(to_json(p));
            return Json{{"kind", "max_with"}, {"parts", parts}};
          },
          [](const form::Rescaled& r) {
            return Json{{"kind", "rescaled"}, {"scale", exact_decimal(r.scale)}, {"base", to_json(*r.base)}};
          },
      },
      f.form());
  return Json{{"domain", {{"lo", decimals(f.domain().lo())}, {"hi", decimals(f.domain().hi())}}},
              {"form", std::move(form)}};
}

ConvexFunction function_from_json(const Json& j) {
  try {
    const Rect domain(read_decimals(j.at("domain").at("lo")), read_decimals(j.at("domain").at("hi")));
    const Json& form = j.at("form");
    const std::string kind = form.at("kind").get<std::string>();
    if (kind == "affine") {
      const auto a = read_affine(form);
      return ConvexFunction::affine(domain, a.coeffs, a.intercept);
    }
    if (kind == "max_affine") {
      std::vector<form::Affine> pieces;
      for (const auto& p : form.at("pieces")) pieces.push_back(read_affine(p));
      return ConvexFunction::max_affine(domain, std::move(pieces));
    }
    if (kind == "separable_quadratic") return ConvexFunction::separable_quadratic(domain);
    if (kind == "hinge")
      return ConvexFunction::hinge(domain, parse_decimal(form.at("alpha").get<std::string>()),
                                   form.at("axis").get<std::size_t>());
    if (kind == "max_with") {
      std::vector<ConvexFunction> parts;
      for (const auto& p : form.at("parts")) parts.push_back(function_from_json(p));
      return ConvexFunction::max_with(std::move(parts));
    }
    if (kind == "rescaled")
      return ConvexFunction::rescaled(function_from_json(form.at("base")), domain,
                                      parse_decimal(form.at("scale").get<std::string>()));
    throw ParameterError("function_from_json: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("function_from_json: malformed object: ") + e.what());
  }
}

Json to_json(const DistanceReport& r) {
  Json metric{{"kind", r.metric.name()}};
  if (r.metric.kind == MetricDescriptor::Kind::lp) metric["p"] = r.metric.p;
  if (r.metric.kind == MetricDescriptor::Kind::hausdorff_epigraph) {
    metric["bound"] = r.metric.bound;
    metric["n_directions"] = r.metric.n_directions;
  }
  return Json{{"metric", metric},
              {"value", r.value},
              {"error_estimate", r.error_estimate},
              {"grid", {{"n", r.grid.n}, {"rule", to_string(r.grid.rule)}}}};
}

Json to_json(const packing::PackingFamily& fam, bool include_functions) {
  Json intervals = Json::array();
  for (const auto& [u, v] : fam.system.intervals) intervals.push_back(Json::array({exact_decimal(u), exact_decimal(v)}));
  Json words = Json::array();
  for (const auto& w : fam.code.words) words.push_back(w.to_hex());
  Json j{{"system",
          {{"eta", to_string(fam.system.eta_exact)},
           {"eta_double", exact_decimal(fam.system.eta)},
           {"d", fam.system.d},
           {"k", fam.system.k},
           {"cells", fam.system.cell_count()},
           {"intervals", intervals}}},
         {"code",
          {{"n", fam.code.n},
           {"min_distance", fam.code.min_distance},
           {"size", fam.code.words.size()},
           {"target", fam.code_target},
           {"shortfall", fam.code_shortfall},
           {"seed", fam.seed},
           {"words", words}}},
         {"zeta", exact_decimal(fam.zeta)},
         {"guaranteed_separation", exact_decimal(fam.guaranteed_sep)},
         {"c1", exact_decimal(fam.c1)},
         {"epsilon", exact_decimal(fam.epsilon)},
         {"log_m", exact_decimal(static_cast<double>(fam.system.cell_count()) / 8.0)}};
  if (include_functions) {
    Json fs = Json::array();
    for (const auto& f : fam.functions) fs.push_back(to_json(f));
    j["functions"] = std::move(fs);
  }
  return j;
}

Json to_json(const schedule::ScheduleReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back(Json{{"m", row.m},
                        {"log_delta", row.log_delta},
                        {"log_alpha", row.log_alpha},
                        {"log_zeta", row.log_zeta},
                        {"ratio", row.ratio},
                        {"ratio_pass", row.ratio_pass},
                        {"zeta_le_one", row.zeta_le_one}});
  return Json{{"p", r.p},
              {"log_eta", r.log_eta},
              {"d", r.d},
              {"A", r.A},
              {"empty", false},
              {"log_u", r.log_u},
              {"rows", rows},
              {"zeta", r.zeta},
              {"checks",
               {{"ratios", {{"pass", r.ratios_pass}}},
                {"S1",
                 {{"log_lhs", r.log_S1},
                  {"log_rhs", r.log_S1_bound},
                  {"log_via_zeta", r.log_S1_via_zeta},
                  {"pass", r.S1_pass}}},
                {"sum_zeta_sq", {{"lhs", r.sum_zeta_sq}, {"rhs", r.sum_zeta_sq_bound}, {"pass", r.sum_zeta_sq_pass}}},
                {"sum_zeta_d", {{"lhs", r.sum_zeta_d}, {"rhs", r.sum_zeta_d_bound}, {"pass", r.sum_zeta_d_pass}}},
                {"closed_form",
                 {{"max_log_discrepancy", r.closed_form_discrepancy}, {"pass", r.closed_form_pass}}}}},
              {"all_pass", r.all_pass}};
}

Json empty_schedule_json(double log_eta, double p, double log_u) {
  return Json{{"p", p}, {"log_eta", log_eta}, {"A", 0}, {"empty", true}, {"log_u", log_u}, {"all_pass", true}};
}

Json to_json(const verify::InequalityReport& r) {
  return Json{{"name", r.name},       {"lhs", r.lhs},   {"rhs", r.rhs},      {"slack", r.slack},
              {"tolerance", r.tolerance}, {"pass", r.pass}, {"inputs", r.inputs}};
}

void write_certificate_csv(std::ostream& os, const packing::PackingCertificate& cert) {
  os << "i,j,hamming,l1_distance,bound,margin,pass\n";
  for (const auto& r : cert.rows)
    os << r.i << ',' << r.j << ',' << r.hamming << ',' << exact_decimal(r.l1) << ',' << exact_decimal(r.bound) << ','
       << exact_decimal(r.margin) << ',' << (r.pass ? 1 : 0) << '\n';
}

void write_curve_csv(std::ostream& os, const std::vector<packing::CurvePoint>& curve, std::size_t d) {
  os << "eta,k,epsilon,log_m,log_m_eps_scaled\n";
  for (const auto& pt : curve)
    os << to_string(pt.eta) << ',' << pt.k << ',' << exact_decimal(pt.epsilon) << ',' << exact_decimal(pt.log_m) << ','
       << exact_decimal(pt.log_m * std::pow(pt.epsilon, static_cast<double>(d) / 2.0)) << '\n';
}

void write_schedule_csv(std::ostream& os, const schedule::ScheduleReport& r) {
  os << "m,log_delta,log_alpha,log_zeta,ratio,ratio_pass,zeta_le_one\n";
  for (const auto& row : r.rows)
    os << row.m << ',' << exact_decimal(row.log_delta) << ',' << exact_decimal(row.log_alpha) << ','
       << exact_decimal(row.log_zeta) << ',' << exact_decimal(row.ratio) << ',' << (row.ratio_pass ? 1 : 0) << ','
       << (row.zeta_le_one ? 1 : 0) << '\n';
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_summary_csv(std::ostream& os, const std::vector<verify::InequalityReport>& reports) {
  os << "name,lhs,rhs,slack,tolerance,pass\n";
  for (const auto& r : reports)
    os << csv_field(r.name) << ',' << exact_decimal(r.lhs) << ',' << exact_decimal(r.rhs) << ','
       << exact_decimal(r.slack) << ',' << exact_decimal(r.tolerance) << ',' << (r.pass ? 1 : 0) << '\n';
}

void write_jsonl(std::ostream& os, const std::vector<verify::InequalityReport>& reports) {
  for (const auto& r : reports) os << to_json(r).dump() << '\n';
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string loglog_svg(const PlotSeries& pts, double ref_slope, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel) {
  if (pts.x.empty() || pts.x.size() != pts.y.size()) throw ParameterError("loglog_svg: need matching non-empty series");
  for (std::size_t i = 0; i < pts.x.size(); ++i)
    if (!(pts.x[i] > 0.0) || !(pts.y[i] > 0.0)) throw ParameterError("loglog_svg: values must be positive");

  constexpr double W = 640, H = 480, L = 80, R = 30, T = 50, B = 60;
  std::vector<double> lx, ly;
  for (double v : pts.x) lx.push_back(std::log10(v));
  for (double v : pts.y) ly.push_back(std::log10(v));
  double x0 = std::floor(*std::min_element(lx.begin(), lx.end()));
  double x1 = std::ceil(*std::max_element(lx.begin(), lx.end()));
  double y0 = std::floor(*std::min_element(ly.begin(), ly.end()));
  double y1 = std::ceil(*std::max_element(ly.begin(), ly.end()));
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  auto px = [&](double lxv) { return L + (lxv - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double lyv) { return H - B - (lyv - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << xml_escape(title) << "</text>\n";
  s << "<g stroke=\"black\" fill=\"none\">\n";
  s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << L << "\" y2=\"" << T << "\"/>\n";
  s << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double e = x0; e <= x1 + 1e-9; e += 1.0)
    s << "<text x=\"" << px(e) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
      << short_decimal(std::pow(10.0, e)) << "</text>\n";
  for (double e = y0; e <= y1 + 1e-9; e += 1.0)
    s << "<text x=\"" << L - 8 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">"
      << short_decimal(std::pow(10.0, e)) << "</text>\n";
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << xml_escape(xlabel)
    << "</text>\n";
  s << "<text x=\"20\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << (T + H - B) / 2 << ")\">" << xml_escape(ylabel) << "</text>\n</g>\n";

  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    cx += lx[i];
    cy += ly[i];
  }
  cx /= static_cast<double>(lx.size());
  cy /= static_cast<double>(ly.size());
  const double ya = cy + ref_slope * (x0 - cx);
  const double yb = cy + ref_slope * (x1 - cx);
  s << "<line x1=\"" << px(x0) << "\" y1=\"" << py(ya) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(yb)
    << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  s << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
    << "font-size=\"11\" fill=\"gray\">reference slope " << short_decimal(ref_slope) << "</text>\n";
  s << "<g fill=\"steelblue\" font-family=\"sans-serif\" font-size=\"9\">\n";
  for (std::size_t i = 0; i < lx.size(); ++i) {
    s << "<circle cx=\"" << px(lx[i]) << "\" cy=\"" << py(ly[i]) << "\" r=\"4\"><title>(" << short_decimal(pts.x[i])
      << ", " << short_decimal(pts.y[i]) << ")</title></circle>\n";
    s << "<text x=\"" << px(lx[i]) + 6 << "\" y=\"" << py(ly[i]) - 6 << "\" fill=\"black\">"
      << short_decimal(pts.y[i]) << "</text>\n";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ParameterError("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw ParameterError("failed writing output file '" + path + "'");
}

}  // namespace metent::io
