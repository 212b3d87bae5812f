#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tzlab/integer_linear_algebra.hpp"

namespace tzlab {

using IntVec = std::vector<std::int64_t>;

/// Linear torus action t.z_i = t^{w_i} z_i on C^{d+1}; column i of W is w_i.
struct WeightedAction {
  int d = 0;
  int g = 0;
  IntMatrix W;
  /// lambda with lambda.w_i >= 1 for all i, present iff 0 is not in conv{w_i}.
  std::optional<std::vector<Rational>> cert;

  bool has_cert() const { return cert.has_value(); }
  IntVec weight(int i) const { return W.column(i); }
  /// cert scaled by the lcm of its denominators (integer, lambda.w_i >= 1).
  IntVec integer_cert() const;
  /// W * alpha
  IntVec apply(const IntVec& alpha) const;
};

WeightedAction validate_action(const IntMatrix& W);
/// Entry point for untyped input (e.g. parsed JSON); rejects non-integers.
WeightedAction validate_action(const std::vector<std::vector<double>>& W);

struct MultiIndex {
  IntVec alpha;
  std::int64_t degree = 0;
};

struct IsotypeBasis {
  WeightedAction action;
  IntVec varpi;
  std::vector<MultiIndex> entries;  // ascending degree, lexicographically decreasing alpha within a degree
  std::int64_t n_min = 0;
  std::int64_t n_max = -1;
  /// varpi == 0: rejected with an empty basis instead of the constants.
  bool zero_varpi = false;

  std::size_t size() const { return entries.size(); }
};

IsotypeBasis isotype_basis(const WeightedAction& a, const IntVec& varpi);
std::size_t isotype_dimension(const WeightedAction& a, const IntVec& varpi);
std::vector<std::int64_t> degree_spectrum(const WeightedAction& a, const IntVec& varpi);

/// Degree bounds implied by the certificate: every alpha with W alpha = varpi
/// has n_min <= |alpha| <= n_max.
std::pair<std::int64_t, std::int64_t> degree_window(const WeightedAction& a, const IntVec& varpi);

inline constexpr std::int64_t kDefaultStabilizerCap = 1'000'000;

/// {theta in R^g / Z^g : w_i.theta in Z for i in support}. Angles are
/// stored as integer numerators over the common denominator `denominator`.
struct StabilizerGroup {
  std::vector<int> support;
  bool positive_dimensional = false;
  std::int64_t order = 0;             // 0 when positive dimensional
  std::int64_t denominator = 1;
  std::vector<IntVec> generators;     // numerators, one per nontrivial invariant factor
  std::vector<std::int64_t> generator_orders;
  std::vector<IntVec> elements;       // numerators in [0, denominator)
  bool enumerated = false;

  std::vector<double> angle(std::size_t element) const;
};

StabilizerGroup stabilizer(const WeightedAction& a, const std::vector<int>& support,
                           std::int64_t cap = kDefaultStabilizerCap);

struct CharacterSum {
  std::complex<double> value;  // sum of exp(2 pi i k varpi.theta)
  std::int64_t exact = 0;      // |G| if the character is trivial on G, else 0
};

/// Sum over G of chi_varpi^k. The floating value is accumulated from exactly
/// reduced angles; since G is a group the sum is |G| or 0, returned in `exact`.
CharacterSum character_sum(const StabilizerGroup& G, const IntVec& varpi, std::int64_t k);

/// Order of the stabilizer of a point with full support.
std::int64_t generic_stabilizer_order(const WeightedAction& a);

}  // namespace tzlab
