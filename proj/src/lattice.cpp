#include "thetacong/lattice.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <numeric>
#include <set>

#include "thetacong/hnf.hpp"

namespace thetacong {

namespace {

struct LabelInfo {
  Label label;
  std::string_view ascii;
  std::string_view greek;
};

constexpr std::array<LabelInfo, 12> kLabels{{
    {Label::Alpha, "alpha", "α"},
    {Label::Delta, "delta", "δ"},
    {Label::Epsilon, "epsilon", "ε"},
    {Label::Iota, "iota", "ι"},
    {Label::Kappa, "kappa", "κ"},
    {Label::Chi, "chi", "χ"},
    {Label::Psi, "psi", "ψ"},
    {Label::Omega, "omega", "ω"},
    {Label::S1, "S1", "S₁"},
    {Label::S2, "S2", "S₂"},
    {Label::S3, "S3", "S₃"},
    {Label::AdHoc, "adhoc", "adhoc"},
}};

RatMatrix inverse(const IntMatrix& m) {
  const std::size_t n = m.rows();
  RatMatrix a(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = m(i, j);
    a(i, n + i) = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) throw InvalidArgument("singular matrix");
    for (std::size_t j = 0; j < 2 * n; ++j) std::swap(a(c, j), a(p, j));
    Rational piv = a(c, c);
    for (std::size_t j = 0; j < 2 * n; ++j) a(c, j) /= piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      Rational f = a(i, c);
      for (std::size_t j = 0; j < 2 * n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  RatMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = a(i, n + j);
  return inv;
}

// 0-based index of the fundamental weight representing glue class c.
int weight_index(const RootComponent& comp, int c) {
  switch (comp.family) {
    case RootFamily::A:
      return c - 1;
    case RootFamily::D:
      if (c == 1) return comp.rank - 1;
      if (c == 2) return 0;
      return comp.rank - 2;
    case RootFamily::E:
      break;
  }
  throw InvalidArgument("E-type components carry no glue here");
}

EvenGram gram_from_int(const IntMatrix& m) {
  Matrix<std::int64_t> e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!m(i, j).fits_slong_p()) throw ConstructionFailure("Gram entry out of range");
      e(i, j) = m(i, j).get_si();
    }
  try {
    return EvenGram(std::move(e));
  } catch (const Error& err) {
    throw ConstructionFailure(std::string("assembled Gram rejected: ") + err.what());
  }
}

// Gram of the lattice whose basis rows are H/scale, in a space with Gram `ambient`.
IntMatrix scaled_gram(const IntMatrix& h, const IntMatrix& ambient, const Integer& scale_sq) {
  IntMatrix g = h * ambient * h.transpose();
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      if (!mpz_divisible_p(g(i, j).get_mpz_t(), scale_sq.get_mpz_t()))
        throw ConstructionFailure("glued basis is not integral");
      mpz_divexact(g(i, j).get_mpz_t(), g(i, j).get_mpz_t(), scale_sq.get_mpz_t());
    }
  return g;
}

void require_unimodular(const Lattice& lat) {
  if (lat.gram.det() != 1)
    throw ConstructionFailure(lat.name + ": determinant " + lat.gram.det().get_str() + " != 1");
}

std::vector<int> cyclic_word(int q, int n, const std::vector<int>& poly, int shift) {
  std::vector<int> w(n, 0);
  for (std::size_t i = 0; i < poly.size(); ++i) w[(shift + i) % n] = ((poly[i] % q) + q) % q;
  return w;
}

}  // namespace

std::string_view label_name(Label label) {
  for (const auto& info : kLabels)
    if (info.label == label) return info.ascii;
  return "adhoc";
}

Label parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const auto& info : kLabels) {
    if (info.label == Label::AdHoc) continue;
    std::string ascii(info.ascii);
    std::transform(ascii.begin(), ascii.end(), ascii.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == ascii || text == info.greek) return info.label;
  }
  throw UnknownLabel("unsupported lattice label '" + std::string(text) + "'");
}

bool is_niemeier(Label label) {
  const auto& all = niemeier_labels();
  return std::find(all.begin(), all.end(), label) != all.end();
}

const std::vector<Label>& niemeier_labels() {
  static const std::vector<Label> labels{Label::Alpha, Label::Delta, Label::Epsilon, Label::Iota,
                                         Label::Kappa, Label::Chi,   Label::Psi,     Label::Omega};
  return labels;
}

std::string RootComponent::name() const {
  const char* f = family == RootFamily::A ? "A" : family == RootFamily::D ? "D" : "E";
  return f + std::to_string(rank);
}

int RootComponent::glue_group_order() const {
  switch (family) {
    case RootFamily::A:
      return rank + 1;
    case RootFamily::D:
      return 4;
    case RootFamily::E:
      return 9 - rank;
  }
  return 1;
}

int RootComponent::add_classes(int a, int b) const {
  if (family == RootFamily::D && rank % 2 == 0) return a ^ b;
  return (a + b) % glue_group_order();
}

Rational RootComponent::class_norm(int c) const {
  if (c == 0) return 0;
  switch (family) {
    case RootFamily::A:
      return Rational(c * (rank + 1 - c), rank + 1);
    case RootFamily::D:
      return c == 2 ? Rational(1) : Rational(rank, 4);
    case RootFamily::E:
      break;
  }
  throw InvalidArgument("E-type components carry no glue here");
}

EvenGram root_gram(RootFamily family, int rank) {
  Matrix<std::int64_t> c(rank > 0 ? rank : 0, rank > 0 ? rank : 0);
  auto link = [&](int i, int j) { c(i, j) = c(j, i) = -1; };
  switch (family) {
    case RootFamily::A:
      if (rank < 1) throw InvalidRank("A_n needs n >= 1");
      for (int i = 0; i + 1 < rank; ++i) link(i, i + 1);
      break;
    case RootFamily::D:
      if (rank < 3) throw InvalidRank("D_n needs n >= 3");
      for (int i = 0; i + 2 < rank; ++i) link(i, i + 1);
      link(rank - 3, rank - 1);
      break;
    case RootFamily::E:
      if (rank < 6 || rank > 8) throw InvalidRank("E_n needs n in 6..8");
      // Bourbaki numbering: 1-3-4-5-6(-7(-8)) with 2 attached to 4.
      link(0, 2);
      link(2, 3);
      link(1, 3);
      for (int i = 3; i + 1 < rank; ++i) link(i, i + 1);
      break;
  }
  for (int i = 0; i < rank; ++i) c(i, i) = 2;
  return EvenGram(std::move(c));
}

GlueCode GlueCode::generate(std::vector<RootComponent> components, std::vector<std::vector<int>> generators) {
  GlueCode code;
  code.components = std::move(components);
  code.generators = std::move(generators);
  const std::size_t len = code.components.size();
  for (const auto& g : code.generators)
    if (g.size() != len) throw InvalidArgument("glue generator has the wrong length");
  std::set<std::vector<int>> seen{std::vector<int>(len, 0)};
  std::vector<std::vector<int>> frontier{std::vector<int>(len, 0)};
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& w : frontier)
      for (const auto& g : code.generators) {
        std::vector<int> s(len);
        for (std::size_t i = 0; i < len; ++i) s[i] = code.components[i].add_classes(w[i], g[i]);
        if (seen.insert(s).second) next.push_back(std::move(s));
      }
    frontier = std::move(next);
  }
  code.words.assign(seen.begin(), seen.end());
  return code;
}

bool GlueCode::is_closed() const {
  std::set<std::vector<int>> all(words.begin(), words.end());
  for (const auto& a : words)
    for (const auto& g : generators) {
      std::vector<int> s(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) s[i] = components[i].add_classes(a[i], g[i]);
      if (!all.count(s)) return false;
    }
  return true;
}

GlueCode golay_code(GolayKind kind) {
  if (kind == GolayKind::Binary24) {
    // Generator polynomial of the [23,12,7] quadratic-residue code.
    const std::vector<int> poly{1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1};
    std::vector<std::vector<int>> gens;
    for (int s = 0; s < 12; ++s) {
      auto w = cyclic_word(2, 23, poly, s);
      w.push_back(std::accumulate(w.begin(), w.end(), 0) % 2);
      gens.push_back(std::move(w));
    }
    return GlueCode::generate(std::vector<RootComponent>(24, {RootFamily::A, 1}), std::move(gens));
  }
  // x^5 + x^4 - x^3 + x^2 - 1 over GF(3), length 11.
  const std::vector<int> poly{2, 0, 1, 2, 1, 1};
  std::vector<std::vector<int>> gens;
  for (int s = 0; s < 6; ++s) {
    auto w = cyclic_word(3, 11, poly, s);
    w.push_back((3 - std::accumulate(w.begin(), w.end(), 0) % 3) % 3);
    gens.push_back(std::move(w));
  }
  return GlueCode::generate(std::vector<RootComponent>(12, {RootFamily::A, 2}), std::move(gens));
}

int word_weight(const std::vector<int>& word) {
  return static_cast<int>(std::count_if(word.begin(), word.end(), [](int c) { return c != 0; }));
}

Lattice assemble_niemeier(Label label) {
  using F = RootFamily;
  std::vector<RootComponent> comps;
  std::vector<std::vector<int>> gens;
  auto repeat = [](RootComponent c, int k) { return std::vector<RootComponent>(k, c); };
  switch (label) {
    case Label::Alpha:
      comps = {{F::D, 24}};
      gens = {{1}};
      break;
    case Label::Delta:
      comps = {{F::A, 24}};
      gens = {{5}};
      break;
    case Label::Epsilon:
      comps = repeat({F::D, 12}, 2);
      gens = {{1, 2}, {2, 1}};
      break;
    case Label::Iota:
      comps = repeat({F::D, 8}, 3);
      gens = {{1, 2, 2}, {2, 1, 2}, {2, 2, 1}};
      break;
    case Label::Kappa:
      comps = repeat({F::A, 12}, 2);
      gens = {{1, 5}};
      break;
    case Label::Chi: {
      auto code = golay_code(GolayKind::Ternary12);
      comps = code.components;
      gens = code.generators;
      break;
    }
    case Label::Psi: {
      auto code = golay_code(GolayKind::Binary24);
      comps = code.components;
      gens = code.generators;
      break;
    }
    default:
      throw UnknownLabel("no glue data for label '" + std::string(label_name(label)) + "'");
  }
  GlueCode code = GlueCode::generate(comps, gens);

  std::vector<IntMatrix> blocks;
  std::vector<RatMatrix> inverses;
  std::size_t dim = 0;
  Integer root_det = 1;
  for (const auto& c : comps) {
    blocks.push_back(root_gram(c.family, c.rank).to_int());
    inverses.push_back(inverse(blocks.back()));
    root_det *= det_exact(blocks.back());
    dim += c.rank;
  }
  const IntMatrix cartan = direct_sum(blocks);
  if (Integer(static_cast<unsigned long>(code.size() * code.size())) != root_det)
    throw ConstructionFailure("glue code size squared does not match the root determinant");

  // Glue vectors in simple-root coordinates: sums of fundamental weights.
  std::vector<std::vector<Rational>> glue_rows;
  Integer scale = 1;
  for (const auto& g : gens) {
    std::vector<Rational> row(dim);
    std::size_t off = 0;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      if (g[k] != 0) {
        const int w = weight_index(comps[k], g[k]);
        for (int j = 0; j < comps[k].rank; ++j) {
          row[off + j] = inverses[k](w, j);
          scale = lcm(scale, Integer(row[off + j].get_den()));
        }
      }
      off += comps[k].rank;
    }
    glue_rows.push_back(std::move(row));
  }

  IntMatrix stacked(dim + glue_rows.size(), dim);
  for (std::size_t i = 0; i < dim; ++i) stacked(i, i) = scale;
  for (std::size_t r = 0; r < glue_rows.size(); ++r)
    for (std::size_t j = 0; j < dim; ++j) {
      Rational v = glue_rows[r][j] * scale;
      stacked(dim + r, j) = v.get_num();
    }
  IntMatrix h = hermite_normal_form(stacked);
  if (h.rows() != dim) throw ConstructionFailure("glued generators do not span full rank");

  Lattice lat;
  lat.label = label;
  lat.name = std::string(label_name(label));
  lat.gram = gram_from_int(scaled_gram(h, cartan, scale * scale));
  lat.coxeter = coxeter_number(label);
  std::string desc;
  for (std::size_t k = 0; k < comps.size(); ++k) desc += (k ? "+" : "") + comps[k].name();
  lat.construction = {desc + " with " + std::to_string(code.size()) + " glue words", comps, gens, code.size()};
  if (lat.rank() != 24) throw ConstructionFailure(lat.name + ": rank is not 24");
  require_unimodular(lat);
  return lat;
}

Lattice build_leech() {
  // Coordinates are sqrt(8) times the usual ones, so norms scale by 8.
  const auto code = golay_code(GolayKind::Binary24);
  std::vector<std::vector<long>> gens;
  for (const auto& w : code.generators) {
    std::vector<long> v(24);
    for (int i = 0; i < 24; ++i) v[i] = 2 * w[i];
    gens.push_back(std::move(v));
  }
  for (int j = 1; j < 24; ++j)
    for (int s : {1, -1}) {
      std::vector<long> v(24, 0);
      v[0] = 4;
      v[j] = 4 * s;
      gens.push_back(std::move(v));
    }
  std::vector<long> odd(24, 1);
  odd[0] = -3;
  gens.push_back(odd);

  IntMatrix stacked(gens.size(), 24);
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (int j = 0; j < 24; ++j) stacked(i, j) = gens[i][j];
  IntMatrix h = hermite_normal_form(stacked);
  if (h.rows() != 24) throw ConstructionFailure("Leech generators do not span full rank");

  Lattice lat;
  lat.label = Label::Omega;
  lat.name = "omega";
  lat.gram = gram_from_int(scaled_gram(h, IntMatrix::identity(24), 8));
  lat.coxeter = 0;
  lat.construction = {"Leech lattice from the extended binary Golay code", {}, code.generators, code.size()};
  require_unimodular(lat);
  return lat;
}

Lattice quaternary_gram(int index) {
  Matrix<std::int64_t> s;
  switch (index) {
    case 1:
      s = {{2, 0, 1, 0}, {0, 2, 0, 1}, {1, 0, 6, 0}, {0, 1, 0, 6}};
      break;
    case 2:
      s = {{2, 1, 1, 1}, {1, 2, 0, 1}, {1, 0, 8, 4}, {1, 1, 4, 8}};
      break;
    case 3:
      s = {{4, 2, 1, 1}, {2, 4, 0, 1}, {1, 0, 4, 2}, {1, 1, 2, 4}};
      break;
    default:
      throw UnknownLabel("quaternary form index must be 1, 2 or 3");
  }
  Lattice lat;
  lat.label = index == 1 ? Label::S1 : index == 2 ? Label::S2 : Label::S3;
  lat.name = "S" + std::to_string(index);
  lat.gram = EvenGram(std::move(s));
  lat.construction = {"quaternary form of determinant 11^2 and level 11", {}, {}, 0};
  return lat;
}

int coxeter_number(Label label) {
  switch (label) {
    case Label::Alpha:
      return 46;
    case Label::Delta:
      return 25;
    case Label::Epsilon:
      return 22;
    case Label::Iota:
      return 14;
    case Label::Kappa:
      return 13;
    case Label::Chi:
      return 3;
    case Label::Psi:
      return 2;
    case Label::Omega:
      return 0;
    default:
      throw UnknownLabel("no Coxeter number for label '" + std::string(label_name(label)) + "'");
  }
}

Lattice build_lattice(Label label) {
  switch (label) {
    case Label::Omega:
      return build_leech();
    case Label::S1:
      return quaternary_gram(1);
    case Label::S2:
      return quaternary_gram(2);
    case Label::S3:
      return quaternary_gram(3);
    case Label::AdHoc:
      throw UnknownLabel("ad-hoc lattices need an explicit Gram matrix");
    default:
      return assemble_niemeier(label);
  }
}

Lattice make_lattice(std::string name, EvenGram gram) {
  Lattice lat;
  lat.label = Label::AdHoc;
  lat.name = std::move(name);
  lat.gram = std::move(gram);
  lat.construction = {"explicit Gram matrix", {}, {}, 0};
  return lat;
}

}  // namespace thetacong
