#include "doctest.h"
#include "json.hpp"
#include "thetacong/congruence.hpp"
#include "thetacong/errors.hpp"

using namespace thetacong;

TEST_SUITE("congruence") {
  TEST_CASE("Sturm diagonal bounds at weight 12") {
    CHECK(sturm_diag_bound(12, 1) == 1);
    CHECK(sturm_diag_bound(12, 2) == 1);
    CHECK(sturm_diag_bound(12, 3) == 1);
    CHECK(sturm_diag_bound(12, 4) == 2);
    CHECK(sturm_diag_bound(12, 5) == 3);
    CHECK(sturm_diag_bound(16, 1) == 1);
    CHECK_THROWS_AS(sturm_diag_bound(0, 1), InvalidArgument);
  }

  TEST_CASE("scaled theta operator") {
    QExpansion f(2, 1, "f");
    for (const auto& k : psd_classes(2, 1)) f.set(k, 5);
    const QExpansion g = theta_operator_scaled(f);
    CHECK(g.label() == "Theta(f)");
    CHECK(g.at(decode_binary(1, 0, 1)) == 20);
    CHECK(g.at(decode_binary(1, 1, 1)) == 15);
    CHECK(g.at(decode_binary(1, 2, 1)) == 0);
  }

  TEST_CASE("Coxeter numbers mod 11") {
    CHECK(coxeter_congruent(Label::Alpha, Label::Kappa, 11));
    CHECK(coxeter_congruent(Label::Kappa, Label::Psi, 11));
    CHECK(coxeter_congruent(Label::Delta, Label::Chi, 11));
    CHECK(coxeter_congruent(Label::Epsilon, Label::Omega, 11));
    CHECK_FALSE(coxeter_congruent(Label::Alpha, Label::Delta, 11));
    CHECK_THROWS_AS(coxeter_congruent(Label::S1, Label::Alpha, 11), UnknownLabel);
  }

  TEST_CASE("families") {
    CHECK(theorem_family(1) == std::vector<Label>{Label::Alpha, Label::Kappa, Label::Psi, Label::S1});
    CHECK(theorem_family(3).back() == Label::S3);
    CHECK_THROWS_AS(theorem_family(4), InvalidArgument);
  }

  TEST_CASE("a non-congruent family is reported class by class") {
    ThetaEngine eng;
    CongruenceReport r;
    const QExpansion a = eng.theta_block(build_lattice(Label::Alpha), 2, 1);
    const QExpansion d = eng.theta_block(build_lattice(Label::Delta), 2, 1);
    const auto bad = check_family(r, {a, d}, 11, 1, "alpha vs delta");
    CHECK(bad > 0);
    CHECK(r.violations() == bad);
    CHECK(r.verdicts.size() == psd_classes(2, 1).size());
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["verdict"] == "fail");
    CHECK(r.to_text().find("VIOLATION") != std::string::npos);
  }

  TEST_CASE("verifiers on the degree <= 3 boxes") {
    ThetaEngine eng;
    for (int part = 1; part <= 3; ++part) {
      const CongruenceReport r = verify_theorem_3_1(eng, part);
      INFO(r.to_text());
      CHECK(r.pass());
      CHECK(r.diag_bound == 1);
      CHECK(r.verdicts.size() == 2 + 5 + 13);
      CHECK_FALSE(r.evidence_only);
    }
    const CongruenceReport m23 = verify_observation(eng, "mod23");
    CHECK(m23.pass());
    CHECK(m23.evidence_only);
    CHECK(m23.caveat.find("Evidence, not proof") == 0);
    CHECK_THROWS_AS(verify_observation(eng, "mod5"), InvalidArgument);
  }
}
