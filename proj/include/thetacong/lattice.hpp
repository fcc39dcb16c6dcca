#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thetacong/forms.hpp"

namespace thetacong {

/// The lattices this toolkit knows by name. Greek labels follow the
/// Coxeter-number ordering of the Niemeier classification.
enum class Label { Alpha, Delta, Epsilon, Iota, Kappa, Chi, Psi, Omega, S1, S2, S3, AdHoc };

/// ASCII name used on the command line and in files ("alpha", "S1", ...).
std::string_view label_name(Label label);
/// Accepts ASCII names (case-insensitive) and the Greek letters themselves.
Label parse_label(std::string_view text);
bool is_niemeier(Label label);

/// The eight Niemeier labels handled here, in Coxeter order.
const std::vector<Label>& niemeier_labels();

enum class RootFamily { A, D, E };

struct RootComponent {
  RootFamily family;
  int rank;

  std::string name() const;  // "A24", "D12", ...
  /// Order of the discriminant group (det of the Cartan matrix).
  int glue_group_order() const;
  /// Sum of glue classes a + b in the discriminant group.
  int add_classes(int a, int b) const;
  /// Norm of the minimal representative of glue class c, as a fraction.
  Rational class_norm(int c) const;

  friend bool operator==(const RootComponent&, const RootComponent&) = default;
};

/// Cartan-matrix Gram of an irreducible root lattice (simple-root basis).
/// A_n uses the path ordering; D_n has alpha_{n-2} joined to both
/// alpha_{n-1} and alpha_n. Throws InvalidRank.
EvenGram root_gram(RootFamily family, int rank);

/// A glue code: a subgroup of the product of the components' discriminant
/// groups, given by generators and closed into the full word list.
struct GlueCode {
  std::vector<RootComponent> components;
  std::vector<std::vector<int>> generators;
  std::vector<std::vector<int>> words;  // sorted, includes the zero word

  std::size_t size() const { return words.size(); }
  /// Closes `generators` under the componentwise group law.
  static GlueCode generate(std::vector<RootComponent> components, std::vector<std::vector<int>> generators);
  bool is_closed() const;
};

enum class GolayKind { Binary24, Ternary12 };

/// Extended binary [24,12,8] (over A1^24) or ternary [12,6,6] (over A2^12)
/// Golay code, from the quadratic-residue cyclic codes of length 23 and 11.
GlueCode golay_code(GolayKind kind);

/// Hamming weight of a glue word.
int word_weight(const std::vector<int>& word);

struct Construction {
  std::string description;
  std::vector<RootComponent> components;
  std::vector<std::vector<int>> glue_generators;
  std::size_t glue_code_size = 0;
};

struct Lattice {
  Label label = Label::AdHoc;
  std::string name;
  EvenGram gram;
  std::optional<int> coxeter;
  Construction construction;

  std::size_t rank() const { return gram.rank(); }
};

/// Root lattice plus glue for one of alpha, delta, epsilon, iota, kappa,
/// chi, psi. Checks det 1 and evenness; throws ConstructionFailure.
Lattice assemble_niemeier(Label label);

/// Leech lattice from the binary Golay code, scaled to an even unimodular
/// integral Gram. Checks det 1 and evenness; throws ConstructionFailure.
Lattice build_leech();

/// Quaternary forms S1, S2, S3 of determinant 121 and level 11.
Lattice quaternary_gram(int index);

/// Coxeter number for the eight Niemeier labels; UnknownLabel otherwise.
int coxeter_number(Label label);

/// Dispatches to the constructors above.
Lattice build_lattice(Label label);

/// Ad-hoc lattice from a Gram matrix (validated as an EvenGram).
Lattice make_lattice(std::string name, EvenGram gram);

}  // namespace thetacong
