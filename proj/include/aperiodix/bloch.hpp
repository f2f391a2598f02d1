#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aperiodix/cohomology.hpp"
#include "aperiodix/diffraction.hpp"
#include "aperiodix/families.hpp"
#include "aperiodix/label_group.hpp"
#include "aperiodix/spectral.hpp"

namespace aperiodix {

inline FourierModule module_for_family(const Family& f) {
  if (!f.builtin) return FourierModule::continuous();
  if (f.name == "periodic") return FourierModule::cyclic(1);
  if (f.name == "fibonacci") return FourierModule::two_generator(2 / (1 + std::sqrt(5.0)));
  if (f.name == "thue-morse") return FourierModule::dyadic(2, 8);
  if (f.name == "period-doubling") return FourierModule::dyadic(2, 0);
  return FourierModule::continuous();
}

struct BlochOptions {
  std::optional<unsigned> spectral_order;
  std::optional<unsigned> diffraction_order;
  SpectralModel model = SpectralModel::onsite_model(0, 1);
  double rel_threshold = kDefaultRelThreshold;
  double tol = kDefaultLabelTol;
  LabelBounds bounds;
  ModuleBounds module_bounds;
  std::size_t max_peaks = 8;
  unsigned threads = 1;
  std::size_t length_cap = kDefaultLengthCap;
  // Precomputed gaps replace the spectral computation when present.
  std::optional<std::vector<Gap>> gaps;
};

struct GapCheck {
  Gap gap;
  double label_target = 0;  // bulk value when available, else ids_value
  NearestResult label;
  bool in_group = false;
};

struct BraggCheck {
  double k = 0;
  double x = 0;  // k / (2 pi)
  PeakClass classification = PeakClass::Flat;
  double gamma = 0;
  bool in_module = false;
  std::optional<BraggLabel> module_label;
  double module_residual = INFINITY;
  NearestResult trace_label;
  bool in_trace = false;
};

struct Verdicts {
  bool gaps_in_trace_group = false;
  bool bragg_in_module = false;
  bool diffraction_matches_trace = false;
};

struct CorrespondenceReport {
  std::string family;
  unsigned spectral_order = 0;
  unsigned diffraction_order = 0;
  std::vector<unsigned> fit_orders;
  SpectralModel model;
  double rel_threshold = 0;
  double tol = 0;
  LabelBounds bounds;
  std::size_t chain_size = 0;
  std::vector<GapCheck> gaps;
  LabelGroup trace_group;
  DirectLimitGroup h1;
  FourierModule module;
  double k_resolution = 0;
  double max_s_over_n = 0;
  std::set<SpectrumTag> tags;
  std::vector<BraggCheck> bragg;
  Verdicts verdicts;
  // Kept for plotting.
  EnergySpectrum spectrum;
  DiffractionSpectrum diffraction;
};

inline Verdicts derive_verdicts(const CorrespondenceReport& r) {
  Verdicts v;
  v.gaps_in_trace_group = true;
  for (const auto& g : r.gaps) v.gaps_in_trace_group = v.gaps_in_trace_group && g.label.residual <= r.tol;
  v.bragg_in_module = true;
  bool bragg_in_trace = true;
  for (const auto& b : r.bragg) {
    if (b.classification != PeakClass::Bragg) continue;
    v.bragg_in_module = v.bragg_in_module && b.in_module;
    bragg_in_trace = bragg_in_trace && b.in_trace;
  }
  v.diffraction_matches_trace = r.tags == std::set<SpectrumTag>{SpectrumTag::PP} && bragg_in_trace;
  return v;
}

inline CorrespondenceReport bloch_report(const Family& fam, const BlochOptions& opt = {}) {
  CorrespondenceReport rep;
  rep.family = fam.name;
  rep.spectral_order = opt.spectral_order.value_or(fam.spectral_order);
  rep.diffraction_order = opt.diffraction_order.value_or(fam.diffraction_order);
  rep.model = opt.model;
  rep.rel_threshold = opt.rel_threshold;
  rep.tol = opt.tol;
  rep.bounds = opt.bounds;
  rep.trace_group = trace_image(fam.rule).group;
  rep.h1 = cech_h1(fam.rule);

  // Spectral side: gaps of the open chain, labelled by the ring count at the gap centre.
  std::string word = family_word(fam, rep.spectral_order, opt.length_cap);
  TightBindingChain chain = build_chain(word, opt.model);
  rep.chain_size = chain.size();
  std::vector<Gap> gaps;
  if (opt.gaps) {
    gaps = *opt.gaps;
  } else {
    rep.spectrum = eigenvalues_tridiag(chain, opt.threads);
    gaps = detect_gaps(rep.spectrum, opt.rel_threshold);
    assign_bulk_ids(gaps, chain);
  }
  for (const auto& g : gaps) {
    GapCheck c;
    c.gap = g;
    c.label_target = g.bulk_ids.value_or(g.ids_value);
    c.label = nearest_element(c.label_target, rep.trace_group, opt.bounds);
    c.in_group = c.label.residual <= opt.tol;
    rep.gaps.push_back(c);
  }

  // Diffraction side.
  ClassifyOptions co;
  co.selection_order = rep.diffraction_order;
  co.fit_orders = opt.diffraction_order ? order_range(rep.diffraction_order - 5, rep.diffraction_order - 1)
                                        : fam.fit_orders;
  co.max_peaks = opt.max_peaks;
  co.threads = opt.threads;
  rep.fit_orders = co.fit_orders;
  DiffractionChainBuilder build{&fam, opt.length_cap};
  ClassifiedSpectrum cs = classify_spectrum(build, co);
  rep.diffraction = cs.grid;
  rep.k_resolution = cs.grid.spacing();
  rep.max_s_over_n = cs.max_s_over_n;
  rep.tags = cs.tags;
  rep.module = module_for_family(fam);
  auto predicted = predicted_bragg(rep.module, opt.module_bounds, co.k_min - 1, co.k_max + 1);
  const double two_pi = 2 * std::numbers::pi;
  for (const auto& p : cs.peaks) {
    BraggCheck b;
    b.k = p.k_star;
    b.x = p.k_star / two_pi;
    b.classification = p.classification;
    b.gamma = p.gamma;
    BraggLabel lab;
    double res = INFINITY;
    if (nearest_bragg(predicted, b.k, lab, res)) {
      b.module_label = lab;
      b.module_residual = res;
    }
    b.in_module = b.module_residual <= rep.k_resolution;
    b.trace_label = nearest_element(b.x, rep.trace_group, opt.bounds);
    b.in_trace = b.trace_label.residual <= rep.k_resolution / two_pi;
    rep.bragg.push_back(b);
  }
  rep.verdicts = derive_verdicts(rep);
  return rep;
}

inline CorrespondenceReport bloch_report(const std::string& family, const BlochOptions& opt = {}) {
  return bloch_report(builtin_family(family), opt);
}

}  // namespace aperiodix
