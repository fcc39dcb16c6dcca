#include "thetacong/congruence.hpp"

#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "thetacong/errors.hpp"

namespace thetacong {

namespace {

const char* kPromotionCaveat =
    "Agreement is checked on every class of the box only. Extending it to all T relies on two results "
    "that are not recomputed here: the existence of a level-one Siegel modular form of weight p+1 "
    "congruent mod p to the quaternary theta series (lift theorem), and the Sturm bound for Siegel "
    "modular forms mod p.";

const char* kEvidenceCaveat =
    "Evidence, not proof: an observed congruence checked on a finite box; no Sturm-type bound applies, "
    "so nothing outside the box is implied.";

}  // namespace

int sturm_diag_bound(int k, int n) {
  if (k < 1 || n < 1) throw InvalidArgument("weight and degree must be >= 1");
  Integer num = k, den = 16;
  for (int i = 0; i < n; ++i) num *= 4, den *= 3;
  Integer q = num / den;  // both positive, so truncation is the floor
  return static_cast<int>(q.get_si());
}

QExpansion theta_operator_scaled(const QExpansion& f) {
  QExpansion out(f.degree(), f.box_bound(), "Theta(" + f.label() + ")");
  for (const auto& [key, value] : f.coefficients()) out.set(key, value * discriminant(key.matrix()));
  return out;
}

bool coxeter_congruent(Label l1, Label l2, int p) {
  if (p < 2) throw InvalidArgument("modulus must be >= 2");
  return (coxeter_number(l1) - coxeter_number(l2)) % p == 0;
}

std::size_t CongruenceReport::violations() const {
  std::size_t n = 0;
  for (const auto& v : verdicts) n += !v.ok;
  return n;
}

std::vector<const Verdict*> CongruenceReport::failures() const {
  std::vector<const Verdict*> out;
  for (const auto& v : verdicts)
    if (!v.ok) out.push_back(&v);
  return out;
}

std::string CongruenceReport::to_json() const {
  nlohmann::json j;
  j["claim"] = claim;
  j["prime"] = prime;
  j["weight"] = weight;
  j["degree"] = degree;
  j["diag_bound"] = diag_bound;
  j["verdict"] = pass() ? "pass" : "fail";
  j["violations"] = violations();
  j["evidence_only"] = evidence_only;
  j["caveat"] = caveat;
  j["notes"] = notes;
  auto& arr = j["checks"] = nlohmann::json::array();
  for (const auto& v : verdicts) {
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [name, value] : v.values) values[name] = value.get_str();
    arr.push_back({{"check", v.check}, {"key", v.key.str()}, {"d_T", v.d_t.get_str()}, {"values", values}, {"ok", v.ok}});
  }
  return j.dump(2);
}

std::string CongruenceReport::to_text() const {
  std::ostringstream os;
  os << "claim " << claim << ": " << (pass() ? "PASS" : "FAIL") << "\n";
  os << "  p = " << prime << ", weight " << weight << ", degree " << degree << ", t_ii <= " << diag_bound << "\n";
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_check;
  for (const auto& v : verdicts) {
    auto& [total, bad] = per_check[v.check];
    ++total;
    bad += !v.ok;
  }
  for (const auto& [check, counts] : per_check)
    os << "  " << check << ": " << counts.first << " classes, " << counts.second << " violations\n";
  for (const Verdict* v : failures()) {
    os << "  VIOLATION " << v->check << " at " << v->key.str() << " (d_T = " << v->d_t << "):";
    for (const auto& [name, value] : v->values) os << " " << name << "=" << value;
    os << "\n";
  }
  for (const auto& n : notes) os << "  note: " << n << "\n";
  if (!caveat.empty()) os << "  caveat: " << caveat << "\n";
  return os.str();
}

std::size_t check_family(CongruenceReport& report, const std::vector<QExpansion>& family, int p, int bound,
                         const std::string& check) {
  if (family.size() < 2) throw InvalidArgument("a congruence family needs two expansions");
  // Run the pairwise comparisons so missing classes and short boxes surface.
  std::set<CanonicalKey> bad;
  for (std::size_t a = 0; a < family.size(); ++a)
    for (std::size_t b = a + 1; b < family.size(); ++b)
      for (const auto& m : qexp_congruent(family[a], family[b], p, bound).mismatches) bad.insert(m.key);
  for (const auto& key : psd_classes(family[0].degree(), bound)) {
    Verdict v;
    v.check = check;
    v.key = key;
    v.d_t = discriminant(key.matrix());
    for (const auto& f : family) v.values.emplace_back(f.label(), f.at(key.matrix()));
    v.ok = !bad.count(key);
    report.verdicts.push_back(std::move(v));
  }
  return bad.size();
}

std::size_t check_kernel(CongruenceReport& report, const QExpansion& f, long modulus, const std::string& check) {
  const QExpansion scaled = theta_operator_scaled(f);
  std::size_t bad = 0;
  for (const auto& [key, value] : scaled.coefficients()) {
    Verdict v;
    v.check = check;
    v.key = key;
    v.d_t = discriminant(key.matrix());
    v.values = {{f.label(), f.coefficients().at(key)}, {"det(2T)*a", value}};
    v.ok = residue(value, modulus) == 0;
    bad += !v.ok;
    report.verdicts.push_back(std::move(v));
  }
  return bad;
}

const std::vector<Label>& theorem_family(int part) {
  static const std::vector<std::vector<Label>> families = {
      {Label::Alpha, Label::Kappa, Label::Psi, Label::S1},
      {Label::Delta, Label::Iota, Label::Chi, Label::S2},
      {Label::Epsilon, Label::Omega, Label::S3},
  };
  if (part < 1 || part > 3) throw InvalidArgument("part must be 1, 2 or 3");
  return families[part - 1];
}

CongruenceReport verify_theorem_3_1(ThetaEngine& engine, int part) {
  static const char* names[] = {"i", "ii", "iii"};
  const auto& family = theorem_family(part);
  CongruenceReport report;
  report.claim = std::string("thm3.1.") + names[part - 1];
  report.prime = 11;
  report.weight = 12;
  report.degree = 3;
  report.diag_bound = sturm_diag_bound(12, 3);
  report.caveat = kPromotionCaveat;

  // Coxeter numbers must agree mod 11 inside the rank-24 part of the family.
  std::vector<Label> niemeier;
  for (Label l : family)
    if (is_niemeier(l)) niemeier.push_back(l);
  std::ostringstream screen;
  screen << "Coxeter pre-screen mod 11:";
  bool screen_ok = true;
  for (Label l : niemeier) screen << " h(" << label_name(l) << ")=" << coxeter_number(l);
  for (std::size_t i = 1; i < niemeier.size(); ++i) screen_ok = screen_ok && coxeter_congruent(niemeier[0], niemeier[i], 11);
  screen << (screen_ok ? " -- all congruent" : " -- NOT congruent");
  report.notes.push_back(screen.str());
  if (!screen_ok) {
    Verdict v;
    v.check = "coxeter";
    v.ok = false;
    report.verdicts.push_back(v);
  }

  for (int n = 1; n <= 3; ++n) {
    const int bound = sturm_diag_bound(12, n);
    std::vector<QExpansion> blocks;
    for (Label l : family) blocks.push_back(engine.theta_block(build_lattice(l), n, bound));
    check_family(report, blocks, 11, bound, "degree " + std::to_string(n));
  }
  return report;
}

CongruenceReport verify_theorem_4_1(ThetaEngine& engine) {
  CongruenceReport report;
  report.claim = "thm4.1";
  report.prime = 11;
  report.weight = 12;
  report.degree = 4;
  report.diag_bound = sturm_diag_bound(12, 4);
  report.caveat = kPromotionCaveat;

  const Lattice leech = build_lattice(Label::Omega);
  const Lattice s3 = build_lattice(Label::S3);
  const QExpansion fw = engine.theta_block(leech, 4, report.diag_bound);
  const QExpansion fs = engine.theta_block(s3, 4, report.diag_bound);
  check_family(report, {fw, fs}, 11, report.diag_bound, "congruence");

  const Integer aut = aut_order(s3.gram);
  report.notes.push_back("|Aut(S3)| = " + aut.get_str() + " by backtracking over basis images");
  report.notes.push_back("the d_T = 121 comparison is against S3, the class of the genus with minimum 4 "
                         "(the genus has only the classes S1, S2, S3)");
  report.notes.push_back("theta operator taken in the 2^n-scaled form det(2T)*a(T); for odd p the mod-p kernel "
                         "is the same as for det(T)*a(T)");

  for (const auto& [key, a] : fw.coefficients()) {
    const HalfIntegralMatrix t = key.matrix();
    const Integer d = discriminant(t);
    bool short_diag = false;
    for (int i = 0; i < 4; ++i) short_diag = short_diag || t.diag(i) == 1;
    if (short_diag) report.verdicts.push_back({"leech has no roots", key, d, {{fw.label(), a}}, a == 0});
    const Integer& b = fs.coefficients().at(key);
    if (d > 0 && d < 121) report.verdicts.push_back({"S3 vanishes below 121", key, d, {{fs.label(), b}}, b == 0});
    if (d == 121)
      report.verdicts.push_back({"S3 equals |Aut| at 121", key, d, {{fs.label(), b}, {"|Aut(S3)|", aut}}, b == aut});
  }
  // the one box class where 11^2 divides the Leech coefficient
  const CanonicalKey k128 = canonical_key(decode_ozeki4({2, 2, 2, 2, 0, 0, 0, 2, 2, 0}));
  const Integer& a128 = fw.coefficients().at(k128);
  report.verdicts.push_back({"11^2 at d_T = 128", k128, discriminant(k128.matrix()), {{fw.label(), a128}},
                             residue(a128, 121) == 0});

  check_kernel(report, fw, 11, "theta operator mod 11");
  return report;
}

CongruenceReport verify_observation(ThetaEngine& engine, const std::string& which) {
  const Lattice leech = build_lattice(Label::Omega);
  CongruenceReport report;
  report.evidence_only = true;
  report.caveat = kEvidenceCaveat;
  report.weight = 12;
  if (which == "mod7") {
    report.claim = "obs-mod7";
    report.prime = 7;
    report.degree = 4;
    report.diag_bound = 2;
    for (int n = 1; n <= 4; ++n) {
      const QExpansion f = engine.theta_block(leech, n, report.diag_bound);
      for (const auto& [key, a] : f.coefficients()) {
        if (key.matrix().is_zero()) continue;
        report.verdicts.push_back({"degree " + std::to_string(n) + " a = 0 mod 7", key,
                                   discriminant(key.matrix()), {{f.label(), a}}, residue(a, 7) == 0});
      }
    }
    report.notes.push_back("T = 0 excluded (coefficient 1)");
  } else if (which == "mod49") {
    report.claim = "obs-mod49";
    report.prime = 7;
    report.degree = 4;
    report.diag_bound = 2;
    check_kernel(report, engine.theta_block(leech, 4, report.diag_bound), 49, "det(2T)*a = 0 mod 49");
    report.notes.push_back("modulus 49; the degree-5 statement is out of scope");
  } else if (which == "mod23") {
    report.claim = "intro-mod23";
    report.prime = 23;
    report.degree = 2;
    report.diag_bound = 2;
    check_kernel(report, engine.theta_block(leech, 2, report.diag_bound), 23, "det(2T)*a = 0 mod 23");
    report.notes.push_back("box t_ii <= 2 contains the degree-2 Sturm box t_ii <= " +
                           std::to_string(sturm_diag_bound(12, 2)));
  } else {
    throw InvalidArgument("unknown observation '" + which + "' (mod7, mod49, mod23)");
  }
  return report;
}

}  // namespace thetacong
