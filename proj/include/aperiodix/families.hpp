#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aperiodix/error.hpp"
#include "aperiodix/geometry.hpp"
#include "aperiodix/substitution.hpp"

namespace aperiodix {

// A substitution together with how its letters become tiles and the run sizes used by reports.
struct Family {
  std::string name;
  SubstitutionRule rule;
  char seed = 'a';
  std::string tiles;                 // tiles[i] is the tile letter of rule.alphabet[i]
  TileLengths diffraction_lengths;   // per tile letter
  unsigned spectral_order = 10;
  unsigned diffraction_order = 12;   // order whose grid selects candidate peaks
  std::vector<unsigned> fit_orders;  // orders of the peak scaling fits
  bool builtin = false;

  char tile_of(char letter) const { return tiles[static_cast<std::size_t>(rule.index_of(letter))]; }
};

inline const std::vector<std::string>& builtin_family_names() {
  static const std::vector<std::string> names{"periodic", "fibonacci", "thue-morse", "period-doubling",
                                              "rudin-shapiro"};
  return names;
}

inline std::vector<unsigned> order_range(unsigned first, unsigned last) {
  std::vector<unsigned> v;
  for (unsigned o = first; o <= last; ++o) v.push_back(o);
  return v;
}

// Thue-Morse and Rudin-Shapiro get incommensurate tile lengths for diffraction: with equal lengths
// every atom sits on Z and the spectrum collapses onto the lattice comb.
inline Family builtin_family(const std::string& name) {
  const double golden = (1 + std::sqrt(5.0)) / 2;
  const double root2 = std::sqrt(2.0);
  Family f;
  f.name = name;
  f.builtin = true;
  if (name == "periodic") {
    f.rule = make_rule(name, "ab", {"ab", "ab"});
    f.tiles = "ab";
    f.diffraction_lengths = {{'a', 1.0}, {'b', 1.0}};
    f.spectral_order = 8;
    f.diffraction_order = 12;
    f.fit_orders = order_range(7, 11);
  } else if (name == "fibonacci") {
    f.rule = make_rule(name, "ab", {"ab", "a"});
    f.tiles = "ab";
    f.diffraction_lengths = {{'a', golden}, {'b', 1.0}};
    f.spectral_order = 14;
    f.diffraction_order = 17;
    f.fit_orders = order_range(12, 16);
  } else if (name == "thue-morse") {
    f.rule = make_rule(name, "ab", {"ab", "ba"});
    f.tiles = "ab";
    f.diffraction_lengths = {{'a', 1.0}, {'b', root2}};
    f.spectral_order = 11;
    f.diffraction_order = 14;
    f.fit_orders = order_range(10, 13);
  } else if (name == "period-doubling") {
    f.rule = make_rule(name, "ab", {"ab", "aa"});
    f.tiles = "ab";
    f.diffraction_lengths = {{'a', 1.0}, {'b', 1.0}};
    f.spectral_order = 11;
    f.diffraction_order = 13;
    f.fit_orders = order_range(8, 12);
  } else if (name == "rudin-shapiro") {
    f.rule = make_rule(name, "ABCD", {"AB", "AC", "DB", "DC"});
    f.tiles = "abab";
    f.diffraction_lengths = {{'a', 1.0}, {'b', root2}};
    f.spectral_order = 11;
    f.diffraction_order = 12;
    f.fit_orders = order_range(8, 11);
  } else {
    fail(ErrorCode::UnknownFamily, "unknown family '" + name + "'");
  }
  f.seed = f.rule.alphabet[0];
  return f;
}

// Wraps a user rule: letters are their own tiles, lengths default to the Perron lengths, and
// orders are chosen from the word lengths.
inline Family family_from_rule(const SubstitutionRule& rule, std::optional<std::string> tiles = std::nullopt,
                               std::optional<TileLengths> lengths = std::nullopt) {
  validate(rule);
  Family f;
  f.name = rule.name.empty() ? "custom" : rule.name;
  f.rule = rule;
  f.seed = rule.alphabet[0];
  f.tiles = tiles.value_or(rule.alphabet);
  if (f.tiles.size() != rule.alphabet.size()) fail(ErrorCode::InvalidRule, "one tile letter per alphabet letter");
  if (lengths) {
    f.diffraction_lengths = *lengths;
  } else {
    PerronData pd = perron_data(occurrence_matrix(rule));
    for (std::size_t i = 0; i < rule.size(); ++i) f.diffraction_lengths[f.tiles[i]] = pd.lengths[i];
  }
  auto largest_order = [&](double cap) {
    unsigned o = 1;
    while (o < 60 && word_length(rule, f.seed, o + 1) <= BigInt(static_cast<long long>(cap))) ++o;
    return o;
  };
  f.spectral_order = largest_order(2100);
  f.diffraction_order = largest_order(17000);
  unsigned last = f.diffraction_order > 1 ? f.diffraction_order - 1 : 1;
  unsigned first = last >= 4 ? last - 3 : 1;
  f.fit_orders = order_range(first, std::max(last, first + 3));
  return f;
}

inline Family family_by_name(const std::string& name) { return builtin_family(name); }

inline std::string tile_word(const Family& f, const std::string& word) {
  std::string t(word.size(), ' ');
  for (std::size_t i = 0; i < word.size(); ++i) t[i] = f.tile_of(word[i]);
  return t;
}

inline std::string family_word(const Family& f, unsigned order, std::size_t cap = kDefaultLengthCap) {
  return tile_word(f, expand_word(f.rule, f.seed, order, cap));
}

// Letter frequencies summed per tile letter.
inline std::map<char, double> tile_frequencies(const Family& f) {
  PerronData pd = perron_data(occurrence_matrix(f.rule));
  std::map<char, double> out;
  for (std::size_t i = 0; i < f.rule.size(); ++i) out[f.tiles[i]] += pd.freq[i];
  return out;
}

inline double mean_spacing(const Family& f, const TileLengths& lengths) {
  double d = 0;
  for (const auto& [t, rho] : tile_frequencies(f)) {
    auto it = lengths.find(t);
    if (it == lengths.end()) fail(ErrorCode::InvalidArgument, std::string("no length for tile ") + t);
    d += rho * it->second;
  }
  return d;
}

// Perron lengths per tile; letters sharing a tile must agree.
inline TileLengths perron_tile_lengths(const Family& f) {
  PerronData pd = perron_data(occurrence_matrix(f.rule));
  TileLengths out;
  for (std::size_t i = 0; i < f.rule.size(); ++i) {
    auto [it, fresh] = out.emplace(f.tiles[i], pd.lengths[i]);
    if (!fresh && std::abs(it->second - pd.lengths[i]) > 1e-9)
      fail(ErrorCode::InvalidArgument, "letters of one tile have different Perron lengths");
  }
  return out;
}

inline AtomChain family_chain(const Family& f, unsigned order, const TileLengths& lengths,
                              std::size_t cap = kDefaultLengthCap) {
  return positions_from_word(family_word(f, order, cap), lengths);
}

// Chain with the family's diffraction lengths, rescaled to unit mean spacing.
inline AtomChain diffraction_chain(const Family& f, unsigned order, std::size_t cap = kDefaultLengthCap) {
  return rescaled(family_chain(f, order, f.diffraction_lengths, cap), mean_spacing(f, f.diffraction_lengths));
}

struct DiffractionChainBuilder {
  const Family* family;
  std::size_t cap = kDefaultLengthCap;
  AtomChain operator()(unsigned order) const { return diffraction_chain(*family, order, cap); }
};

}  // namespace aperiodix
