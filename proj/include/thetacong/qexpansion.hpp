#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "thetacong/forms.hpp"

namespace thetacong {

/// Finite piece of a Fourier expansion: coefficients a(F;T) for canonical
/// psd classes T inside the box t_ii <= box_bound.
class QExpansion {
public:
  QExpansion(int degree, int box_bound, std::string label);

  int degree() const { return degree_; }
  int box_bound() const { return box_bound_; }
  const std::string& label() const { return label_; }
  const std::map<CanonicalKey, Integer>& coefficients() const { return coeffs_; }

  /// Stores a(F;T) under the canonical key of T.
  void set(const HalfIntegralMatrix& t, Integer value);
  void set(const CanonicalKey& key, Integer value);

  /// nullptr when the class of T has no stored coefficient.
  const Integer* find(const HalfIntegralMatrix& t) const;
  /// Throws InvalidArgument when the class of T is missing.
  const Integer& at(const HalfIntegralMatrix& t) const;

  /// `degree=n;box=b;label=...;format=1` followed by sorted `key;coeff` lines.
  std::string serialize() const;
  static QExpansion parse(std::string_view text);

  friend bool operator==(const QExpansion&, const QExpansion&) = default;

private:
  int degree_;
  int box_bound_;
  std::string label_;
  std::map<CanonicalKey, Integer> coeffs_;
};

struct CoefficientMismatch {
  CanonicalKey key;
  Integer lhs;
  Integer rhs;
};

struct BoxComparison {
  int prime = 0;
  int bound = 0;
  std::size_t classes_checked = 0;
  std::vector<CoefficientMismatch> mismatches;

  bool congruent() const { return mismatches.empty(); }
};

/// Lists every class in the box t_ii <= bound where the two expansions
/// disagree mod p. Both must cover the box (BoxUnderflow otherwise) and hold
/// every class of it.
BoxComparison qexp_congruent(const QExpansion& f1, const QExpansion& f2, int p, int bound);

/// Non-negative residue of v mod p.
long residue(const Integer& v, long p);

}  // namespace thetacong
