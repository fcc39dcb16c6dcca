#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thetacong/matrix.hpp"

namespace thetacong {

/// An index T of a degree-n Fourier coefficient: integer diagonal t_ii and
/// half-integral off-diagonal, stored doubled as g_ij = 2 t_ij. Only the
/// upper triangle is kept, so symmetry holds by construction.
///
/// Equivalently this is the even matrix 2T, whose entries are all integers:
/// doubled(i, i) == 2 t_ii and doubled(i, j) == g_ij.
class HalfIntegralMatrix {
public:
  static constexpr int kMaxDegree = 4;

  explicit HalfIntegralMatrix(int degree = 1);
  /// `offdiag` lists g_ij row-major over the upper triangle: (12,13,14,23,24,34).
  HalfIntegralMatrix(int degree, std::span<const int> diag, std::span<const int> offdiag);

  int degree() const { return n_; }
  int diag(int i) const { return diag_[i]; }
  int doubled(int i, int j) const;

  void set_diag(int i, int value);
  void set_doubled(int i, int j, int value);

  /// The even integer matrix 2T.
  IntMatrix even_matrix() const;

  bool is_zero() const;
  int max_diag() const;

  std::string to_string() const;

  friend bool operator==(const HalfIntegralMatrix&, const HalfIntegralMatrix&) = default;

private:
  int n_;
  std::array<int, 4> diag_{};
  std::array<int, 6> off_{};
};

/// d_T := det(2T).
Integer discriminant(const HalfIntegralMatrix& t);

/// Exact psd test of 2T by rational symmetric pivoting.
bool is_positive_semidefinite(const HalfIntegralMatrix& t);

/// Classical binary notation [a,b,c] for ax^2 + bxy + cy^2.
HalfIntegralMatrix decode_binary(int a, int b, int c);

/// Ternary notation [a,b,c;d,e,f]: diagonal (a,b,c), (g23, g13, g12) = (d, e, f).
HalfIntegralMatrix decode_ternary(int a, int b, int c, int d, int e, int f);

/// Ten-tuple (t11,t22,t33,t44,u12,u13,u23,u14,u24,u34); the u's are entries
/// of 2T. Throws InvalidArgument when the decoded T is not psd.
HalfIntegralMatrix decode_ozeki4(const std::array<int, 10>& tuple);

/// Representative of the class of T under simultaneous signed permutations
/// of rows and columns: the lexicographically largest image of
/// (diag, offdiag). Representation numbers are constant on classes.
struct CanonicalKey {
  int degree = 0;
  std::array<int, 4> diag{};
  std::array<int, 6> off{};

  auto operator<=>(const CanonicalKey&) const = default;

  HalfIntegralMatrix matrix() const;
  /// "t11,t22|g12" style; never contains ';'.
  std::string str() const;
  static CanonicalKey parse(std::string_view text);
};

CanonicalKey canonical_key(const HalfIntegralMatrix& t);

/// Number of distinct T in the signed-permutation class of `t`.
std::uint64_t class_size(const HalfIntegralMatrix& t);

/// Every canonical psd class of degree n with all t_ii <= bound, sorted.
std::vector<CanonicalKey> psd_classes(int degree, int bound);

/// Even positive-definite Gram matrix of a lattice.
class EvenGram {
public:
  EvenGram() = default;
  /// Validates symmetry, even diagonal and positive definiteness.
  explicit EvenGram(Matrix<std::int64_t> entries);

  std::size_t rank() const { return entries_.rows(); }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const Matrix<std::int64_t>& entries() const { return entries_; }

  IntMatrix to_int() const;
  Integer det() const;
  /// Stable 64-bit FNV-1a hash of the entries, as 16 hex digits.
  std::string hash() const;

  friend bool operator==(const EvenGram& a, const EvenGram& b) { return a.entries_ == b.entries_; }

private:
  Matrix<std::int64_t> entries_;
};

/// Leading principal minors all positive.
bool is_positive_definite(const IntMatrix& m);

}  // namespace thetacong
