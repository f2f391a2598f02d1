#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "aperiodix.hpp"

namespace ax = aperiodix;
using ax::io::Json;
using ax::io::num;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string family;
  std::string rule_file;
  std::optional<unsigned> order;
  std::string seed_letter;
  std::string model = "onsite";
  double va = 0, vb = 1, eps = 1;
  double kmin = 0, kmax = 4 * std::numbers::pi;
  std::size_t samples = 0;
  double rel_threshold = ax::kDefaultRelThreshold;
  int q_max = 30;
  int n_max = 12;
  double tol = ax::kDefaultLabelTol;
  std::string out;
  std::string svg;
  unsigned threads = 1;
  std::string spectrum_file;
  std::string gaps_file;
  std::string slope;
  double phason = 0;
  std::size_t length = 0;
};

void add_source(CLI::App* sub, Options& o) {
  auto* fam = sub->add_option("--family", o.family, "built-in family: periodic, fibonacci, thue-morse, period-doubling, rudin-shapiro");
  auto* rule = sub->add_option("--rule-file", o.rule_file, "substitution rule JSON");
  fam->excludes(rule);
  rule->excludes(fam);
  sub->add_option("--order", o.order, "substitution order");
  sub->add_option("--seed-letter", o.seed_letter, "letter the word is grown from");
  sub->add_option("--out", o.out, "output file (default stdout)");
  sub->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1u, 256u));
}

void add_model(CLI::App* sub, Options& o) {
  sub->add_option("--model", o.model, "onsite or hopping")->check(CLI::IsMember({"onsite", "hopping"}));
  sub->add_option("--va", o.va, "potential of tile a");
  sub->add_option("--vb", o.vb, "potential of tile b");
  sub->add_option("--eps", o.eps, "hopping decay");
}

void add_labels(CLI::App* sub, Options& o) {
  sub->add_option("--rel-threshold", o.rel_threshold, "gap threshold in units of the median level spacing");
  sub->add_option("--q-max", o.q_max, "coordinate bound for labels")->check(CLI::Range(0, 100000));
  sub->add_option("--nmax", o.n_max, "exponent bound for localized labels")->check(CLI::Range(0, 60));
  sub->add_option("--tol", o.tol, "label residual tolerance")->check(CLI::PositiveNumber);
}

ax::Family load_family(const Options& o) {
  ax::Family f;
  if (!o.family.empty()) {
    try {
      f = ax::builtin_family(o.family);
    } catch (const ax::Error& e) {
      if (e.code() == ax::ErrorCode::UnknownFamily) throw UsageError(e.what());
      throw;
    }
  } else if (!o.rule_file.empty()) {
    f = ax::io::family_from_rule_file(o.rule_file);
  } else {
    throw UsageError("one of --family or --rule-file is required");
  }
  if (!o.seed_letter.empty()) {
    if (o.seed_letter.size() != 1 || f.rule.index_of(o.seed_letter[0]) < 0)
      throw UsageError("--seed-letter must be a letter of the alphabet");
    f.seed = o.seed_letter[0];
  }
  return f;
}

ax::SpectralModel model_of(const Options& o) {
  return o.model == "hopping" ? ax::SpectralModel::hopping_model(o.va, o.vb, o.eps)
                              : ax::SpectralModel::onsite_model(o.va, o.vb);
}

ax::LabelBounds bounds_of(const Options& o) {
  ax::LabelBounds b;
  b.q_max = o.q_max;
  b.n_max = o.n_max;
  return b;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty())
    std::cout << text;
  else
    ax::io::write_file(o.out, text);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Json head(const char* command, const ax::Family& f) {
  Json j;
  j["schema"] = ax::io::kSchemaVersion;
  j["command"] = command;
  j["family"] = f.name;
  j["rule"] = ax::io::rule_json(f.rule);
  return j;
}

void run_cut_project(const Options& o) {
  if (o.length == 0) throw UsageError("--length is required with --slope");
  ax::CPParams prm;
  try {
    prm.slope = ax::Slope::parse(o.slope);
  } catch (const ax::Error& e) {
    throw UsageError(e.what());
  }
  prm.phason = ax::CPParams::reduce(o.phason);
  std::string word = ax::cp_word(prm, 0, o.length);
  auto per = ax::check_periodicity(prm, std::max<std::size_t>(o.length, 64));
  Json j;
  j["schema"] = ax::io::kSchemaVersion;
  j["command"] = "generate";
  j["cut_project"] = {{"slope", o.slope}, {"slope_value", num(prm.slope.value())}, {"phason", num(prm.phason)}};
  j["length"] = word.size();
  j["word"] = word;
  j["periodic"] = per.periodic;
  if (per.period) j["period"] = *per.period;
  emit(o, ax::io::dump(j));
}

void run_generate(const Options& o) {
  if (!o.slope.empty()) return run_cut_project(o);
  ax::Family f = load_family(o);
  const unsigned order = o.order.value_or(10);
  const std::size_t cap = ax::length_cap_from_env();
  std::string letters = ax::expand_word(f.rule, f.seed, order, cap);
  std::string word = ax::tile_word(f, letters);
  ax::TileLengths lengths = f.diffraction_lengths;
  ax::AtomChain chain = ax::positions_from_word(word, lengths);
  if (ends_with(o.out, ".csv")) {
    emit(o, ax::io::chain_csv(chain));
    return;
  }
  ax::IntMatrix m = ax::occurrence_matrix(f.rule);
  ax::PerronData pd = ax::perron_data(m);
  Json j = head("generate", f);
  j["order"] = order;
  j["seed"] = std::string(1, f.seed);
  j["length"] = word.size();
  j["word"] = word;
  Json counts = Json::object(), freq = Json::object(), plen = Json::object();
  auto stats = ax::letter_statistics(letters);
  for (std::size_t i = 0; i < f.rule.size(); ++i) {
    std::string c(1, f.rule.alphabet[i]);
    counts[c] = static_cast<std::size_t>(stats.frequency(f.rule.alphabet[i]) * static_cast<double>(letters.size()) + 0.5);
    freq[c] = num(pd.freq[i]);
    plen[c] = num(pd.lengths[i]);
  }
  j["letter_counts"] = counts;
  j["perron"] = {{"lambda1", num(pd.lambda1)}, {"frequencies", freq}, {"lengths", plen}};
  j["occurrence_matrix"] = ax::io::matrix_json(m);
  double delta_u = std::nan("");
  if (chain.size() >= ax::kMinFluctuationAtoms) {
    auto fs = ax::fluctuation_stats(chain, ax::mean_spacing(f, lengths));
    delta_u = fs.delta_u;
    j["fluctuations"] = {{"delta_u", num(fs.delta_u)}, {"delta_u_raw", num(fs.delta_u_raw)}, {"beta_fit", num(fs.beta_fit)}};
  }
  auto cls = ax::classify_substitution(f.rule, delta_u);
  j["class"] = {{"primitive", cls.primitive},
                {"pisot", cls.pisot},
                {"unimodular", cls.unimodular},
                {"quasiperiodic", cls.quasiperiodic},
                {"common_unimodular", cls.common_unimodular}};
  emit(o, ax::io::dump(j));
}

void run_diffract(const Options& o) {
  ax::Family f = load_family(o);
  const unsigned order = o.order.value_or(f.diffraction_order);
  if (!(o.kmax > o.kmin)) throw UsageError("--kmax must exceed --kmin");
  ax::AtomChain chain = ax::diffraction_chain(f, order, ax::length_cap_from_env());
  std::size_t samples = o.samples;
  if (samples == 0) {
    double lobes = chain.total_length * (o.kmax - o.kmin) / (2 * std::numbers::pi);
    samples = static_cast<std::size_t>(std::ceil(4 * lobes)) + 1;
  }
  if (samples < 2) throw UsageError("--samples must be at least 2");
  auto d = ax::structure_factor_grid(chain, o.kmin, o.kmax, samples, o.threads);
  emit(o, ax::io::diffraction_csv(d));
  if (!o.svg.empty()) {
    ax::io::Series s{f.name, d.k_values, d.S, ax::io::Series::Style::Line};
    ax::io::emit_svg({s, ax::io::peak_markers(d)}, {"k", "S(k)", f.name + " order " + std::to_string(order), false}, o.svg);
  }
}

ax::TightBindingChain spectral_chain(const ax::Family& f, unsigned order, const Options& o) {
  return ax::build_chain(ax::family_word(f, order, ax::length_cap_from_env()), model_of(o));
}

void run_spectrum(const Options& o) {
  ax::Family f = load_family(o);
  auto chain = spectral_chain(f, o.order.value_or(f.spectral_order), o);
  emit(o, ax::io::spectrum_csv(ax::eigenvalues_tridiag(chain, o.threads)));
}

// Gaps of a supplied or computed spectrum; bulk values only when the chain matches its size.
std::vector<ax::Gap> gaps_for(const ax::Family& f, unsigned order, const Options& o) {
  auto chain = spectral_chain(f, order, o);
  ax::EnergySpectrum levels = o.spectrum_file.empty() ? ax::eigenvalues_tridiag(chain, o.threads)
                                                    : ax::io::spectrum_from_text(ax::io::read_file(o.spectrum_file));
  auto gaps = ax::detect_gaps(levels, o.rel_threshold);
  if (levels.size() == chain.size()) ax::assign_bulk_ids(gaps, chain);
  return gaps;
}

void run_gaps(const Options& o) {
  ax::Family f = load_family(o);
  const unsigned order = o.order.value_or(f.spectral_order);
  auto gaps = gaps_for(f, order, o);
  auto group = ax::trace_image(f.rule).group;
  Json j = head("gaps", f);
  j["order"] = order;
  j["model"] = o.model;
  j["rel_threshold"] = num(o.rel_threshold);
  j["tol"] = num(o.tol);
  j["trace_group"] = ax::io::group_json(group);
  Json arr = Json::array();
  for (const auto& g : gaps) {
    Json e = ax::io::gap_json(g);
    auto lab = ax::nearest_element(g.bulk_ids.value_or(g.ids_value), group, bounds_of(o));
    e["label"] = ax::io::element_json(lab);
    e["in_group"] = lab.residual <= o.tol;
    arr.push_back(e);
  }
  j["gaps"] = arr;
  emit(o, ax::io::dump(j));
}

void run_cohomology(const Options& o) {
  ax::Family f = load_family(o);
  Json j = head("cohomology", f);
  Json h1 = ax::io::h1_json(ax::cech_h1(f.rule));
  for (auto& [k, v] : h1.items()) j[k] = v;
  emit(o, ax::io::dump(j));
}

void run_trace(const Options& o) {
  ax::Family f = load_family(o);
  auto t = ax::trace_image(f.rule);
  Json j = head("trace", f);
  j["trace_group"] = ax::io::group_json(t.group);
  Json fr = Json::array();
  for (const auto& s : t.frequencies) fr.push_back(s);
  j["collared_frequencies"] = fr;
  Json sy = Json::array();
  for (const auto& s : t.collared_symbols) sy.push_back(s);
  j["collared_symbols"] = sy;
  if (f.builtin) j["matches_family_group"] = t.group == ax::group_for_family(f.name);
  emit(o, ax::io::dump(j));
}

void run_bloch(const Options& o) {
  ax::Family f = load_family(o);
  ax::BlochOptions bo;
  bo.spectral_order = o.order;
  bo.model = model_of(o);
  bo.rel_threshold = o.rel_threshold;
  bo.tol = o.tol;
  bo.bounds = bounds_of(o);
  bo.threads = o.threads;
  bo.length_cap = ax::length_cap_from_env();
  if (!o.gaps_file.empty())
    bo.gaps = ax::io::gaps_from_json(Json::parse(ax::io::read_file(o.gaps_file)));
  else if (!o.spectrum_file.empty())
    bo.gaps = gaps_for(f, o.order.value_or(f.spectral_order), o);
  auto rep = ax::bloch_report(f, bo);
  emit(o, ax::io::dump(ax::io::report_json(rep)));
  if (!o.svg.empty()) ax::io::write_file(o.svg, ax::io::render_svg(ax::io::report_panels(rep)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aperiodix: one-dimensional aperiodic order toolkit"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "substitution word or cut-and-project sequence");
  add_source(gen, o);
  gen->add_option("--slope", o.slope, "cut-and-project slope: p/q, decimal or 1/golden");
  gen->add_option("--phason", o.phason, "cut-and-project phason");
  gen->add_option("--length", o.length, "cut-and-project word length");

  auto* dif = app.add_subcommand("diffract", "structure factor S(k) on a grid");
  add_source(dif, o);
  dif->add_option("--kmin", o.kmin, "grid start");
  dif->add_option("--kmax", o.kmax, "grid end");
  dif->add_option("--samples", o.samples, "grid points (default four per lobe)");
  dif->add_option("--svg", o.svg, "SVG plot path");

  auto* spe = app.add_subcommand("spectrum", "tight-binding eigenvalues of the open chain");
  add_source(spe, o);
  add_model(spe, o);

  auto* gap = app.add_subcommand("gaps", "spectral gaps with trace-group labels");
  add_source(gap, o);
  add_model(gap, o);
  add_labels(gap, o);
  gap->add_option("--spectrum-file", o.spectrum_file, "eigenvalues from the spectrum command");

  auto* coh = app.add_subcommand("cohomology", "first Cech cohomology of the tiling space");
  add_source(coh, o);

  auto* tra = app.add_subcommand("trace", "image of the cohomology trace");
  add_source(tra, o);

  auto* blo = app.add_subcommand("bloch", "gap labels against Bragg peaks");
  add_source(blo, o);
  add_model(blo, o);
  add_labels(blo, o);
  blo->add_option("--spectrum-file", o.spectrum_file, "eigenvalues from the spectrum command");
  blo->add_option("--gaps-file", o.gaps_file, "output of the gaps command");
  blo->add_option("--svg", o.svg, "SVG summary path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*gen) run_generate(o);
    else if (*dif) run_diffract(o);
    else if (*spe) run_spectrum(o);
    else if (*gap) run_gaps(o);
    else if (*coh) run_cohomology(o);
    else if (*tra) run_trace(o);
    else if (*blo) run_bloch(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ax::Error& e) {
    std::cerr << "error (" << ax::to_string(e.code()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
