#include <map>

#include "doctest.h"
#include "support.hpp"
#include "thetacong/errors.hpp"
#include "thetacong/lattice.hpp"
#include "thetacong/short_vectors.hpp"

using namespace thetacong;

namespace {

bool even_symmetric(const EvenGram& g) {
  for (std::size_t i = 0; i < g.rank(); ++i) {
    if (g(i, i) % 2) return false;
    for (std::size_t j = 0; j < g.rank(); ++j)
      if (g(i, j) != g(j, i)) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("labels and Coxeter numbers") {
    const std::map<Label, int> h = {{Label::Alpha, 46}, {Label::Delta, 25}, {Label::Epsilon, 22}, {Label::Iota, 14},
                                    {Label::Kappa, 13}, {Label::Chi, 3},    {Label::Psi, 2},      {Label::Omega, 0}};
    for (auto [l, v] : h) CHECK(coxeter_number(l) == v);
    CHECK(parse_label("OMEGA") == Label::Omega);
    CHECK(parse_label("s2") == Label::S2);
    CHECK_THROWS_AS(parse_label("zeta"), UnknownLabel);
    CHECK_THROWS_AS(coxeter_number(Label::S1), UnknownLabel);
    CHECK(niemeier_labels().size() == 8);
  }

  TEST_CASE("root lattice Grams") {
    CHECK(root_gram(RootFamily::A, 2).det() == 3);
    CHECK(root_gram(RootFamily::A, 24).det() == 25);
    CHECK(root_gram(RootFamily::D, 4).det() == 4);
    CHECK(root_gram(RootFamily::D, 12).det() == 4);
    CHECK(root_gram(RootFamily::E, 6).det() == 3);
    CHECK(root_gram(RootFamily::E, 8).det() == 1);
    CHECK_THROWS_AS(root_gram(RootFamily::E, 9), InvalidRank);
    CHECK_THROWS_AS(root_gram(RootFamily::A, 0), InvalidRank);
  }

  TEST_CASE("Golay codes have the classical weight enumerators") {
    std::map<int, int> binary, ternary;
    for (const auto& w : golay_code(GolayKind::Binary24).words) ++binary[word_weight(w)];
    for (const auto& w : golay_code(GolayKind::Ternary12).words) ++ternary[word_weight(w)];
    CHECK(binary == std::map<int, int>{{0, 1}, {8, 759}, {12, 2576}, {16, 759}, {24, 1}});
    CHECK(ternary == std::map<int, int>{{0, 1}, {6, 264}, {9, 440}, {12, 24}});
  }

  TEST_CASE("Niemeier lattices: even, unimodular, 24h roots, glue index formula") {
    for (Label l : niemeier_labels()) {
      const Lattice lat = build_lattice(l);
      INFO(lat.name);
      CHECK(lat.rank() == 24);
      CHECK(even_symmetric(lat.gram));
      CHECK(lat.gram.det() == 1);
      if (l == Label::Omega) continue;
      CHECK(enumerate_short(lat, 2).count(2) == 24u * static_cast<unsigned>(coxeter_number(l)));
      Integer root_det = 1;
      for (const auto& c : lat.construction.components) root_det *= c.glue_group_order();
      const Integer glue = static_cast<unsigned long>(lat.construction.glue_code_size);
      CHECK(glue * glue == root_det);
    }
  }

  TEST_CASE("Leech lattice") {
    const Lattice w = build_lattice(Label::Omega);
    const VectorList vl = enumerate_short(w, 4);
    CHECK(vl.count(2) == 0);
    CHECK(vl.count(4) == 196560);
  }

  TEST_CASE("quaternary forms of discriminant 121") {
    const Lattice s1 = quaternary_gram(1), s2 = quaternary_gram(2), s3 = quaternary_gram(3);
    CHECK(s1.gram(0, 0) == 2);
    CHECK(s1.gram(0, 1) == 0);
    CHECK(s1.gram(0, 2) == 1);
    CHECK(s1.gram(0, 3) == 0);
    for (const Lattice* l : {&s1, &s2, &s3}) {
      CHECK(l->gram.det() == 121);
      CHECK(even_symmetric(l->gram));
    }
    for (int i = 0; i < 4; ++i) CHECK(s3.gram(i, i) == 4);
    CHECK(enumerate_short(s1, 2).count(2) > 0);
    CHECK(enumerate_short(s2, 2).count(2) > 0);
    CHECK(enumerate_short(s3, 2).count(2) == 0);
    CHECK_THROWS(quaternary_gram(4));
  }

  TEST_CASE("ad hoc lattices") {
    const Lattice e8 = make_lattice("e8", root_gram(RootFamily::E, 8));
    CHECK(e8.label == Label::AdHoc);
    CHECK(enumerate_short(e8, 4).count(2) == 240);
    CHECK(enumerate_short(e8, 4).count(4) == 2160);
  }
}
