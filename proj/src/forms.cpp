#include "thetacong/forms.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

namespace thetacong {

namespace {

void check_degree(int n) {
  if (n < 1 || n > HalfIntegralMatrix::kMaxDegree)
    throw InvalidArgument("degree must be in 1..4, got " + std::to_string(n));
}

// Fraction-free symmetric pivoting on a small integer matrix. Each step
// scales the Schur complement by the positive pivot, which keeps signs and
// therefore semidefiniteness intact.
bool psd_pivot(std::vector<std::vector<__int128>> a) {
  std::vector<int> active(a.size());
  std::iota(active.begin(), active.end(), 0);
  while (!active.empty()) {
    int pivot = -1;
    for (int i : active) {
      if (a[i][i] < 0) return false;
      if (a[i][i] > 0 && pivot < 0) pivot = i;
    }
    if (pivot < 0) {
      for (int i : active)
        for (int j : active)
          if (a[i][j] != 0) return false;
      return true;
    }
    std::erase(active, pivot);
    const __int128 p = a[pivot][pivot];
    for (int i : active)
      for (int j : active) a[i][j] = p * a[i][j] - a[i][pivot] * a[pivot][j];
    // Keep magnitudes bounded: divide the active block by its content.
    __int128 g = 0;
    for (int i : active)
      for (int j : active) {
        __int128 v = a[i][j] < 0 ? -a[i][j] : a[i][j];
        while (v) {
          __int128 r = g % v;
          g = v;
          v = r;
        }
      }
    if (g > 1)
      for (int i : active)
        for (int j : active) a[i][j] /= g;
  }
  return true;
}

struct SignedPermutation {
  std::array<int, 4> perm{};
  std::array<int, 4> sign{};
};

const std::vector<SignedPermutation>& signed_permutations(int n) {
  static const auto table = [] {
    std::array<std::vector<SignedPermutation>, 5> out;
    for (int deg = 1; deg <= 4; ++deg) {
      std::array<int, 4> perm{0, 1, 2, 3};
      do {
        // Global sign is irrelevant; fix the sign of slot 0.
        for (int mask = 0; mask < (1 << (deg - 1)); ++mask) {
          SignedPermutation sp;
          sp.perm = perm;
          sp.sign[0] = 1;
          for (int i = 1; i < deg; ++i) sp.sign[i] = (mask >> (i - 1)) & 1 ? -1 : 1;
          out[deg].push_back(sp);
        }
      } while (std::next_permutation(perm.begin(), perm.begin() + deg));
    }
    return out;
  }();
  return table[n];
}

CanonicalKey image(const HalfIntegralMatrix& t, const SignedPermutation& sp) {
  const int n = t.degree();
  CanonicalKey k;
  k.degree = n;
  for (int i = 0; i < n; ++i) k.diag[i] = t.diag(sp.perm[i]);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      k.off[idx++] = sp.sign[i] * sp.sign[j] * t.doubled(sp.perm[i], sp.perm[j]);
  return k;
}

int parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("not an integer: '" + std::string(s) + "'");
  return v;
}

std::vector<int> parse_list(std::string_view s) {
  std::vector<int> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto comma = s.find(',', start);
    out.push_back(parse_int(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

HalfIntegralMatrix::HalfIntegralMatrix(int degree) : n_(degree) { check_degree(degree); }

HalfIntegralMatrix::HalfIntegralMatrix(int degree, std::span<const int> diag,
                                       std::span<const int> offdiag)
    : n_(degree) {
  check_degree(degree);
  if (static_cast<int>(diag.size()) != degree ||
      static_cast<int>(offdiag.size()) != degree * (degree - 1) / 2)
    throw InvalidArgument("HalfIntegralMatrix: wrong number of entries");
  for (int i = 0; i < degree; ++i) set_diag(i, diag[i]);
  std::copy(offdiag.begin(), offdiag.end(), off_.begin());
}

int HalfIntegralMatrix::doubled(int i, int j) const {
  if (i == j) return 2 * diag_[i];
  // For degree < 4 the compact row-major triangle differs from the 4x4 one.
  if (i > j) std::swap(i, j);
  int idx = 0;
  for (int r = 0; r < i; ++r) idx += n_ - 1 - r;
  return off_[idx + (j - i - 1)];
}

void HalfIntegralMatrix::set_diag(int i, int value) {
  if (value < 0) throw InvalidArgument("diagonal entries of T must be >= 0");
  diag_[i] = value;
}

void HalfIntegralMatrix::set_doubled(int i, int j, int value) {
  if (i == j) throw InvalidArgument("set_doubled on the diagonal");
  if (i > j) std::swap(i, j);
  int idx = 0;
  for (int r = 0; r < i; ++r) idx += n_ - 1 - r;
  off_[idx + (j - i - 1)] = value;
}

IntMatrix HalfIntegralMatrix::even_matrix() const {
  IntMatrix m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = doubled(i, j);
  return m;
}

bool HalfIntegralMatrix::is_zero() const {
  for (int i = 0; i < n_; ++i)
    if (diag_[i] != 0) return false;
  return std::all_of(off_.begin(), off_.end(), [](int v) { return v == 0; });
}

int HalfIntegralMatrix::max_diag() const {
  return *std::max_element(diag_.begin(), diag_.begin() + n_);
}

std::string HalfIntegralMatrix::to_string() const {
  CanonicalKey k;
  k.degree = n_;
  k.diag = diag_;
  k.off = off_;
  return k.str();
}

Integer discriminant(const HalfIntegralMatrix& t) { return det_exact(t.even_matrix()); }

bool is_positive_semidefinite(const HalfIntegralMatrix& t) {
  const int n = t.degree();
  std::vector<std::vector<__int128>> a(n, std::vector<__int128>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = t.doubled(i, j);
  return psd_pivot(std::move(a));
}

HalfIntegralMatrix decode_binary(int a, int b, int c) {
  HalfIntegralMatrix t(2);
  t.set_diag(0, a);
  t.set_diag(1, c);
  t.set_doubled(0, 1, b);
  return t;
}

HalfIntegralMatrix decode_ternary(int a, int b, int c, int d, int e, int f) {
  HalfIntegralMatrix t(3);
  t.set_diag(0, a);
  t.set_diag(1, b);
  t.set_diag(2, c);
  t.set_doubled(1, 2, d);
  t.set_doubled(0, 2, e);
  t.set_doubled(0, 1, f);
  return t;
}

HalfIntegralMatrix decode_ozeki4(const std::array<int, 10>& u) {
  HalfIntegralMatrix t(4);
  for (int i = 0; i < 4; ++i) t.set_diag(i, u[i]);
  t.set_doubled(0, 1, u[4]);
  t.set_doubled(0, 2, u[5]);
  t.set_doubled(1, 2, u[6]);
  t.set_doubled(0, 3, u[7]);
  t.set_doubled(1, 3, u[8]);
  t.set_doubled(2, 3, u[9]);
  if (!is_positive_semidefinite(t))
    throw InvalidArgument("ten-tuple decodes to a matrix that is not psd: " + t.to_string());
  return t;
}

HalfIntegralMatrix CanonicalKey::matrix() const {
  return HalfIntegralMatrix(degree, std::span<const int>(diag.data(), degree),
                            std::span<const int>(off.data(), degree * (degree - 1) / 2));
}

std::string CanonicalKey::str() const {
  std::string s;
  for (int i = 0; i < degree; ++i) {
    if (i) s += ',';
    s += std::to_string(diag[i]);
  }
  s += '|';
  for (int i = 0; i < degree * (degree - 1) / 2; ++i) {
    if (i) s += ',';
    s += std::to_string(off[i]);
  }
  return s;
}

CanonicalKey CanonicalKey::parse(std::string_view text) {
  auto bar = text.find('|');
  if (bar == std::string_view::npos) throw InvalidArgument("key without '|': " + std::string(text));
  auto diag = parse_list(text.substr(0, bar));
  auto off = parse_list(text.substr(bar + 1));
  const int n = static_cast<int>(diag.size());
  check_degree(n);
  if (static_cast<int>(off.size()) != n * (n - 1) / 2)
    throw InvalidArgument("key has wrong off-diagonal count: " + std::string(text));
  CanonicalKey k;
  k.degree = n;
  std::copy(diag.begin(), diag.end(), k.diag.begin());
  std::copy(off.begin(), off.end(), k.off.begin());
  return k;
}

CanonicalKey canonical_key(const HalfIntegralMatrix& t) {
  const auto& perms = signed_permutations(t.degree());
  CanonicalKey best = image(t, perms.front());
  for (std::size_t i = 1; i < perms.size(); ++i) {
    CanonicalKey k = image(t, perms[i]);
    if (k > best) best = k;
  }
  return best;
}

std::uint64_t class_size(const HalfIntegralMatrix& t) {
  std::set<CanonicalKey> seen;
  for (const auto& sp : signed_permutations(t.degree())) seen.insert(image(t, sp));
  return seen.size();
}

std::vector<CanonicalKey> psd_classes(int degree, int bound) {
  check_degree(degree);
  if (bound < 0) throw InvalidArgument("box bound must be >= 0");
  std::set<CanonicalKey> classes;
  const int pairs = degree * (degree - 1) / 2;
  std::array<int, 4> diag{};
  // Canonical representatives have non-increasing diagonals.
  auto visit_diag = [&](auto&& self, int pos, int cap) -> void {
    if (pos == degree) {
      std::array<int, 6> lim{}, off{};
      int idx = 0;
      for (int i = 0; i < degree; ++i)
        for (int j = i + 1; j < degree; ++j) {
          int l = 0;
          while ((l + 1) * (l + 1) <= 4 * diag[i] * diag[j]) ++l;
          lim[idx++] = l;
        }
      for (int i = 0; i < pairs; ++i) off[i] = -lim[i];
      while (true) {
        HalfIntegralMatrix t(degree, std::span<const int>(diag.data(), degree),
                             std::span<const int>(off.data(), pairs));
        if (is_positive_semidefinite(t)) classes.insert(canonical_key(t));
        int i = 0;
        while (i < pairs && off[i] == lim[i]) off[i] = -lim[i], ++i;
        if (i == pairs) break;
        ++off[i];
      }
      return;
    }
    for (int v = cap; v >= 0; --v) {
      diag[pos] = v;
      self(self, pos + 1, v);
    }
  };
  visit_diag(visit_diag, 0, bound);
  return {classes.begin(), classes.end()};
}

EvenGram::EvenGram(Matrix<std::int64_t> entries) : entries_(std::move(entries)) {
  if (!entries_.is_symmetric()) throw InvalidArgument("Gram matrix is not symmetric");
  for (std::size_t i = 0; i < entries_.rows(); ++i)
    if (entries_(i, i) % 2 != 0) throw InvalidArgument("Gram matrix has an odd diagonal entry");
  if (!is_positive_definite(to_int())) throw NotPositiveDefinite("Gram matrix is not positive definite");
}

IntMatrix EvenGram::to_int() const {
  IntMatrix m(rank(), rank());
  for (std::size_t i = 0; i < rank(); ++i)
    for (std::size_t j = 0; j < rank(); ++j) m(i, j) = static_cast<long>(entries_(i, j));
  return m;
}

Integer EvenGram::det() const { return det_exact(to_int()); }

std::string EvenGram::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  mix(std::to_string(rank()));
  for (std::size_t i = 0; i < rank(); ++i)
    for (std::size_t j = 0; j < rank(); ++j) mix("," + std::to_string(entries_(i, j)));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_positive_definite(const IntMatrix& m) {
  if (!m.is_square()) return false;
  for (std::size_t k = 1; k <= m.rows(); ++k) {
    IntMatrix lead(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) lead(i, j) = m(i, j);
    if (det_exact(lead) <= 0) return false;
  }
  return true;
}

}  // namespace thetacong
