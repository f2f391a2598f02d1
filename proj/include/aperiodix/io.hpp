#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "aperiodix/bloch.hpp"
#include "aperiodix/cohomology.hpp"
#include "aperiodix/error.hpp"
#include "aperiodix/families.hpp"
#include "aperiodix/label_group.hpp"
#include "aperiodix/spectral.hpp"
#include "aperiodix/substitution.hpp"

namespace aperiodix::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline std::string fmt15(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// Shortest text that reads back as the same double.
inline std::string fmt_exact(double v) {
  for (int prec = 15; prec <= 17; ++prec) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v || prec == 17) return buf;
  }
  return {};
}

// A double carrying at most 15 significant digits, so JSON dumps stay short and stable.
inline Json num(double v) {
  if (!std::isfinite(v)) return Json(fmt15(v));
  return Json(std::strtod(fmt15(v).c_str(), nullptr));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

// {"name": str, "alphabet": [str], "images": {letter: str}} plus optional
// "tiles": {letter: tile} and "tile_lengths": {tile: number}.
inline Family family_from_json(const Json& j) {
  try {
    SubstitutionRule r;
    r.name = j.value("name", std::string("custom"));
    for (const auto& a : j.at("alphabet")) {
      std::string s = a.get<std::string>();
      if (s.size() != 1) fail(ErrorCode::InvalidRule, "alphabet entries must be single characters");
      r.alphabet += s;
    }
    const auto& img = j.at("images");
    for (char c : r.alphabet) r.images.push_back(img.at(std::string(1, c)).get<std::string>());
    validate(r);
    std::optional<std::string> tiles;
    if (j.contains("tiles")) {
      std::string t;
      for (char c : r.alphabet) {
        std::string v = j["tiles"].at(std::string(1, c)).get<std::string>();
        if (v.size() != 1) fail(ErrorCode::InvalidRule, "tile names must be single characters");
        t += v;
      }
      tiles = t;
    }
    std::optional<TileLengths> lengths;
    if (j.contains("tile_lengths")) {
      TileLengths l;
      for (const auto& [k, v] : j["tile_lengths"].items()) {
        if (k.size() != 1) fail(ErrorCode::InvalidRule, "tile names must be single characters");
        l[k[0]] = v.get<double>();
      }
      lengths = l;
    }
    return family_from_rule(r, tiles, lengths);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidRule, std::string("malformed rule JSON: ") + e.what());
  }
}

inline Family family_from_rule_file(const std::string& path) {
  try {
    return family_from_json(Json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::InvalidRule, std::string("rule file is not JSON: ") + e.what());
  }
}

inline Json rule_json(const SubstitutionRule& r) {
  Json j;
  j["name"] = r.name;
  Json alpha = Json::array();
  Json images = Json::object();
  for (std::size_t i = 0; i < r.size(); ++i) {
    alpha.push_back(std::string(1, r.alphabet[i]));
    images[std::string(1, r.alphabet[i])] = r.images[i];
  }
  j["alphabet"] = alpha;
  j["images"] = images;
  return j;
}

inline Json group_json(const LabelGroup& g) {
  Json j;
  j["name"] = g.canonical_name();
  switch (g.kind()) {
    case LabelGroup::Kind::TwoGen:
      j["kind"] = "TwoGen";
      j["rho"] = num(g.rho());
      break;
    case LabelGroup::Kind::ScaledLocalized:
      j["kind"] = "ScaledLocalized";
      j["a"] = g.scale().str();
      j["p"] = g.prime();
      break;
    case LabelGroup::Kind::Cyclic:
      j["kind"] = "Cyclic";
      j["q"] = g.denominator_q();
      break;
    case LabelGroup::Kind::FreeAbelian: {
      j["kind"] = "FreeAbelian";
      Json gens = Json::array();
      for (double x : g.generators()) gens.push_back(num(x));
      j["generators"] = gens;
      break;
    }
  }
  return j;
}

inline Json matrix_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    rows.push_back(row);
  }
  return rows;
}

inline Json h1_json(const DirectLimitGroup& g) {
  Json j;
  j["H1"] = g.name();
  j["recognized"] = g.recognized;
  j["free_rank"] = g.free_rank;
  Json loc = Json::array();
  for (const auto& [p, m] : g.localized) loc.push_back({{"p", p.str()}, {"multiplicity", m}});
  j["localized"] = loc;
  j["eventual_rank"] = g.eventual_rank;
  j["collar_radius"] = g.radius;
  j["restricted_matrix"] = matrix_json(g.restricted);
  return j;
}

inline Json element_json(const NearestResult& r) {
  Json j;
  Json c = Json::array();
  for (auto v : r.element.coordinates) c.push_back(v);
  j["coordinates"] = c;
  j["value"] = num(r.element.value);
  j["reduced_mod_1"] = num(r.element.reduced_mod_1);
  j["residual"] = num(r.residual);
  return j;
}

inline Json gap_json(const Gap& g) {
  Json j;
  j["lower"] = num(g.lower);
  j["upper"] = num(g.upper);
  j["width"] = num(g.width);
  j["index"] = g.index;
  j["ids"] = num(g.ids_value);
  if (g.bulk_ids) j["bulk_ids"] = num(*g.bulk_ids);
  return j;
}

inline Gap gap_from_json(const Json& j) {
  Gap g;
  g.lower = j.at("lower").get<double>();
  g.upper = j.at("upper").get<double>();
  g.width = j.value("width", g.upper - g.lower);
  g.index = j.value("index", std::size_t{0});
  g.ids_value = j.at("ids").get<double>();
  if (j.contains("bulk_ids")) g.bulk_ids = j["bulk_ids"].get<double>();
  return g;
}

// Accepts the output of `gaps` ({"gaps": [...]}) or a bare array.
inline std::vector<Gap> gaps_from_json(const Json& j) {
  const Json& arr = j.is_array() ? j : j.at("gaps");
  std::vector<Gap> out;
  for (const auto& g : arr) out.push_back(gap_from_json(g));
  return out;
}

inline std::string spectrum_csv(const EnergySpectrum& s) {
  std::string out = "index,eigenvalue\n";
  for (std::size_t i = 0; i < s.size(); ++i) out += std::to_string(i) + "," + fmt_exact(s.eigenvalues[i]) + "\n";
  return out;
}

// Reads `index,eigenvalue` rows (header optional) or a JSON object with "eigenvalues".
inline EnergySpectrum spectrum_from_text(const std::string& text) {
  EnergySpectrum s;
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json j = Json::parse(text);
    for (const auto& v : j.at("eigenvalues")) s.eigenvalues.push_back(v.get<double>());
  } else {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("index", 0) == 0) continue;
      auto comma = line.find(',');
      if (comma == std::string::npos) fail(ErrorCode::IoError, "malformed spectrum row: " + line);
      s.eigenvalues.push_back(std::stod(line.substr(comma + 1)));
    }
  }
  if (!std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()))
    fail(ErrorCode::IoError, "spectrum is not sorted");
  return s;
}

inline std::string chain_csv(const AtomChain& c) {
  std::string out = "index,letter,position\n";
  for (std::size_t i = 0; i < c.size(); ++i)
    out += std::to_string(i) + "," + c.tile_letters[i] + "," + fmt15(c.positions[i]) + "\n";
  return out;
}

inline std::string diffraction_csv(const DiffractionSpectrum& d) {
  std::string out = "k,S\n";
  for (std::size_t i = 0; i < d.k_values.size(); ++i) out += fmt15(d.k_values[i]) + "," + fmt15(d.S[i]) + "\n";
  return out;
}

inline Json report_json(const CorrespondenceReport& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["family"] = r.family;
  j["spectral_order"] = r.spectral_order;
  j["diffraction_order"] = r.diffraction_order;
  Json fo = Json::array();
  for (auto o : r.fit_orders) fo.push_back(o);
  j["fit_orders"] = fo;
  Json model;
  model["kind"] = to_string(r.model.kind);
  for (const auto& [c, v] : r.model.v) model[std::string("v_") + c] = num(v);
  if (r.model.kind == SpectralModel::Kind::Hopping) model["eps"] = num(r.model.eps);
  j["model"] = model;
  j["thresholds"] = {{"rel_threshold", num(r.rel_threshold)},
                     {"tol", num(r.tol)},
                     {"q_max", r.bounds.q_max},
                     {"n_max", r.bounds.n_max}};
  j["H1"] = h1_json(r.h1);
  j["trace_group"] = group_json(r.trace_group);
  j["chain_size"] = r.chain_size;

  Json gaps = Json::array();
  std::vector<double> residuals;
  for (const auto& g : r.gaps) {
    Json e = gap_json(g.gap);
    e["label_target"] = num(g.label_target);
    e["label"] = element_json(g.label);
    e["in_group"] = g.in_group;
    gaps.push_back(e);
    residuals.push_back(g.label.residual);
  }
  j["gap_labels"] = gaps;
  std::sort(residuals.begin(), residuals.end());
  Json dist;
  dist["count"] = residuals.size();
  if (!residuals.empty()) {
    dist["max"] = num(residuals.back());
    dist["median"] = num(residuals[residuals.size() / 2]);
  }
  j["gap_residuals"] = dist;

  Json diff;
  diff["module"] = r.module.description;
  diff["k_resolution"] = num(r.k_resolution);
  diff["max_S_over_N"] = num(r.max_s_over_n);
  Json tags = Json::array();
  for (auto t : r.tags) tags.push_back(to_string(t));
  diff["tags"] = tags;
  Json checks = Json::array();
  for (const auto& b : r.bragg) {
    Json e;
    e["k"] = num(b.k);
    e["k_over_2pi"] = num(b.x);
    e["class"] = to_string(b.classification);
    e["gamma"] = num(b.gamma);
    if (b.module_label) {
      Json lab = Json::array();
      for (auto v : b.module_label->label) lab.push_back(v);
      e["module_label"] = lab;
      e["module_k"] = num(b.module_label->k);
    }
    e["module_residual"] = num(b.module_residual);
    e["in_module"] = b.in_module;
    e["trace_label"] = element_json(b.trace_label);
    e["in_trace"] = b.in_trace;
    checks.push_back(e);
  }
  diff["bragg_checks"] = checks;
  j["diffraction"] = diff;
  j["verdicts"] = {{"gaps_in_trace_group", r.verdicts.gaps_in_trace_group},
                   {"bragg_in_module", r.verdicts.bragg_in_module},
                   {"diffraction_matches_trace", r.verdicts.diffraction_matches_trace}};
  return j;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Static SVG plots.

struct Series {
  enum class Style { Line, Sticks, Steps };
  std::string label;
  std::vector<double> x, y;
  Style style = Style::Line;
};

struct Axes {
  std::string xlabel, ylabel, title;
  bool log_y = false;
};

struct Panel {
  std::vector<Series> series;
  Axes axes;
};

namespace detail {

inline std::string f4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

inline const char* colour(std::size_t i) {
  static const char* c[] = {"#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e"};
  return c[i % 5];
}

inline std::string render_panel(const Panel& p, double top, double width, double height) {
  const double ml = 70, mr = 20, mt = 30, mb = 45;
  const double pw = width - ml - mr, ph = height - mt - mb;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto ty = [&](double v) { return p.axes.log_y ? std::log10(std::max(v, 1e-12)) : v; };
  for (const auto& s : p.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  if (p.series.end() != std::find_if(p.series.begin(), p.series.end(),
                                     [](const Series& s) { return s.style == Series::Style::Sticks; }))
    y0 = std::min(y0, 0.0);
  auto sx = [&](double v) { return ml + (v - x0) / (x1 - x0) * pw; };
  auto sy = [&](double v) { return top + mt + ph - (ty(v) - y0) / (y1 - y0) * ph; };

  std::string o;
  o += "<rect x=\"" + f4(ml) + "\" y=\"" + f4(top + mt) + "\" width=\"" + f4(pw) + "\" height=\"" + f4(ph) +
       "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    double xv = x0 + (x1 - x0) * t / 4, yv = y0 + (y1 - y0) * t / 4;
    double px = ml + pw * t / 4, py = top + mt + ph - ph * t / 4;
    o += "<text x=\"" + f4(px) + "\" y=\"" + f4(top + mt + ph + 16) + "\" font-size=\"11\" text-anchor=\"middle\">" +
         fmt15(std::round(xv * 1000) / 1000) + "</text>\n";
    o += "<text x=\"" + f4(ml - 6) + "\" y=\"" + f4(py + 4) + "\" font-size=\"11\" text-anchor=\"end\">" +
         (p.axes.log_y ? "1e" : "") + fmt15(std::round(yv * 1000) / 1000) + "</text>\n";
  }
  o += "<text x=\"" + f4(ml + pw / 2) + "\" y=\"" + f4(top + height - 8) +
       "\" font-size=\"13\" text-anchor=\"middle\">" + escape(p.axes.xlabel) + "</text>\n";
  o += "<text x=\"16\" y=\"" + f4(top + mt + ph / 2) + "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       f4(top + mt + ph / 2) + ")\">" + escape(p.axes.ylabel) + "</text>\n";
  if (!p.axes.title.empty())
    o += "<text x=\"" + f4(ml + pw / 2) + "\" y=\"" + f4(top + 18) + "\" font-size=\"14\" text-anchor=\"middle\">" +
         escape(p.axes.title) + "</text>\n";

  for (std::size_t si = 0; si < p.series.size(); ++si) {
    const auto& s = p.series[si];
    const char* col = colour(si);
    if (s.style == Series::Style::Sticks) {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        o += "<line x1=\"" + f4(sx(s.x[i])) + "\" y1=\"" + f4(sy(p.axes.log_y ? 1e-12 : 0.0)) + "\" x2=\"" +
             f4(sx(s.x[i])) + "\" y2=\"" + f4(sy(s.y[i])) + "\" stroke=\"" + col + "\" stroke-width=\"1.5\"/>\n";
      continue;
    }
    o += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (s.style == Series::Style::Steps && i > 0) o += f4(sx(s.x[i])) + "," + f4(sy(s.y[i - 1])) + " ";
      o += f4(sx(s.x[i])) + "," + f4(sy(s.y[i])) + (i + 1 < s.x.size() ? " " : "");
    }
    o += "\"/>\n";
    if (!s.label.empty())
      o += "<text x=\"" + f4(ml + pw - 6) + "\" y=\"" + f4(top + mt + 14 + 14.0 * static_cast<double>(si)) +
           "\" font-size=\"11\" text-anchor=\"end\" fill=\"" + col + "\">" + escape(s.label) + "</text>\n";
  }
  return o;
}

}  // namespace detail

inline std::string render_svg(std::vector<Panel> panels) {
  if (panels.empty()) fail(ErrorCode::InvalidArgument, "nothing to plot");
  const double width = 720, height = 300;
  for (auto& p : panels) {
    if (p.series.empty()) fail(ErrorCode::InvalidArgument, "empty plot panel");
    if (p.axes.xlabel.empty()) p.axes.xlabel = "k";
    if (p.axes.ylabel.empty()) p.axes.ylabel = "S(k)";
  }
  std::string o = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::f4(width) + "\" height=\"" +
                  detail::f4(height * static_cast<double>(panels.size())) + "\" viewBox=\"0 0 " + detail::f4(width) +
                  " " + detail::f4(height * static_cast<double>(panels.size())) + "\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i)
    o += detail::render_panel(panels[i], height * static_cast<double>(i), width, height);
  o += "</svg>\n";
  return o;
}

inline void emit_svg(const std::vector<Series>& series, const Axes& axes, const std::string& path) {
  write_file(path, render_svg({Panel{series, axes}}));
}

// Local maxima of S above `fraction` of N, as a stick series.
inline Series peak_markers(const DiffractionSpectrum& d, double fraction = 0.1) {
  Series m;
  m.label = "peaks";
  m.style = Series::Style::Sticks;
  const double n = static_cast<double>(d.N);
  for (std::size_t i = 0; i < d.S.size(); ++i) {
    bool left = i == 0 || d.S[i] > d.S[i - 1];
    bool right = i + 1 == d.S.size() || d.S[i] >= d.S[i + 1];
    if (left && right && d.S[i] >= fraction * n) {
      m.x.push_back(d.k_values[i]);
      m.y.push_back(d.S[i]);
    }
  }
  return m;
}

inline std::vector<Panel> report_panels(const CorrespondenceReport& r) {
  Panel top;
  top.axes = {"k (inverse mean spacing)", "S(k)/N", r.family + ": diffraction", false};
  Series s{"S/N", r.diffraction.k_values, r.diffraction.S, Series::Style::Line};
  for (auto& v : s.y) v /= static_cast<double>(r.diffraction.N);
  top.series.push_back(s);
  Panel bottom;
  bottom.axes = {"energy e", "N(e)", r.family + ": counting function", false};
  Series c{"N(e)", {}, {}, Series::Style::Steps};
  const auto& ev = r.spectrum.eigenvalues;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    c.x.push_back(ev[i]);
    c.y.push_back(static_cast<double>(i + 1) / static_cast<double>(ev.size()));
  }
  if (c.x.empty()) {
    for (const auto& g : r.gaps) {
      c.x.push_back((g.gap.lower + g.gap.upper) / 2);
      c.y.push_back(g.label_target);
    }
    c.style = Series::Style::Sticks;
  }
  if (c.x.empty()) {
    c.x = {0};
    c.y = {0};
  }
  bottom.series.push_back(c);
  return {top, bottom};
}

}  // namespace aperiodix::io
