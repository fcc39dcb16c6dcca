#pragma once

#include <string>
#include <utility>
#include <vector>

#include "thetacong/lattice.hpp"
#include "thetacong/qexpansion.hpp"
#include "thetacong/theta.hpp"

namespace thetacong {

/// floor((4/3)^n * k / 16), exactly.
int sturm_diag_bound(int k, int n);

/// Coefficient at T becomes a(F;T) * det(2T). For odd p this vanishes mod p
/// exactly when a(F;T) * det(T) does.
QExpansion theta_operator_scaled(const QExpansion& f);

/// h(l1) == h(l2) mod p. UnknownLabel for labels without a Coxeter number.
bool coxeter_congruent(Label l1, Label l2, int p);

/// One check on one index class.
struct Verdict {
  std::string check;
  CanonicalKey key;
  Integer d_t;
  std::vector<std::pair<std::string, Integer>> values;
  bool ok = true;
};

struct CongruenceReport {
  std::string claim;
  int prime = 0;
  int weight = 12;
  int degree = 0;
  int diag_bound = 0;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
  /// What the box computation does not by itself establish.
  std::string caveat;
  bool evidence_only = false;

  std::size_t violations() const;
  bool pass() const { return violations() == 0; }
  std::vector<const Verdict*> failures() const;

  std::string to_json() const;
  std::string to_text() const;
};

/// Adds one verdict per class of the box: all expansions agree mod p.
/// Returns the number of disagreeing classes.
std::size_t check_family(CongruenceReport& report, const std::vector<QExpansion>& family, int p, int bound,
                         const std::string& check);

/// Adds one verdict per class: theta_operator_scaled(f) vanishes mod `modulus`.
std::size_t check_kernel(CongruenceReport& report, const QExpansion& f, long modulus, const std::string& check);

/// The three congruence families of rank-24 lattices with a quaternary form.
const std::vector<Label>& theorem_family(int part);

/// Part 1, 2 or 3: pairwise congruence mod 11 on the degree 1..3 boxes.
CongruenceReport verify_theorem_3_1(ThetaEngine& engine, int part);

/// Degree-4 Leech vs S3, mod 11, over the box t_ii <= 2.
CongruenceReport verify_theorem_4_1(ThetaEngine& engine);

/// Evidence checks on Leech data: "mod7" (a = 0 mod 7 off T = 0, degrees
/// 1..4), "mod49" (degree-4 scaled theta operator mod 49), "mod23"
/// (degree-2 scaled theta operator mod 23).
CongruenceReport verify_observation(ThetaEngine& engine, const std::string& which);

}  // namespace thetacong
