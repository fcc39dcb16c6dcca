#include "thetacong/qexpansion.hpp"

#include <sstream>

namespace thetacong {

namespace {

bool in_box(const CanonicalKey& k, int bound) {
  for (int i = 0; i < k.degree; ++i)
    if (k.diag[i] > bound) return false;
  return true;
}

std::string field(std::string_view header, std::string_view name) {
  const std::string tag = std::string(name) + "=";
  std::size_t pos = 0;
  while (pos < header.size()) {
    auto end = header.find(';', pos);
    if (end == std::string_view::npos) end = header.size();
    auto part = header.substr(pos, end - pos);
    if (part.substr(0, tag.size()) == tag) return std::string(part.substr(tag.size()));
    pos = end + 1;
  }
  throw InvalidArgument("expansion header lacks field '" + std::string(name) + "'");
}

}  // namespace

QExpansion::QExpansion(int degree, int box_bound, std::string label)
    : degree_(degree), box_bound_(box_bound), label_(std::move(label)) {
  if (degree < 1 || degree > HalfIntegralMatrix::kMaxDegree)
    throw InvalidArgument("expansion degree must be in 1..4");
  if (box_bound < 0) throw InvalidArgument("expansion box bound must be >= 0");
  if (label_.find(';') != std::string::npos || label_.find('\n') != std::string::npos)
    throw InvalidArgument("expansion label may not contain ';' or newlines");
}

void QExpansion::set(const HalfIntegralMatrix& t, Integer value) {
  if (t.degree() != degree_) throw InvalidArgument("coefficient index has the wrong degree");
  if (!is_positive_semidefinite(t)) throw InvalidArgument("coefficient index is not psd: " + t.to_string());
  set(canonical_key(t), std::move(value));
}

void QExpansion::set(const CanonicalKey& key, Integer value) {
  if (key.degree != degree_) throw InvalidArgument("coefficient index has the wrong degree");
  if (!in_box(key, box_bound_))
    throw InvalidArgument("coefficient index " + key.str() + " lies outside the box");
  coeffs_[key] = std::move(value);
}

const Integer* QExpansion::find(const HalfIntegralMatrix& t) const {
  auto it = coeffs_.find(canonical_key(t));
  return it == coeffs_.end() ? nullptr : &it->second;
}

const Integer& QExpansion::at(const HalfIntegralMatrix& t) const {
  const Integer* v = find(t);
  if (!v) throw InvalidArgument(label_ + ": no coefficient stored for " + t.to_string());
  return *v;
}

std::string QExpansion::serialize() const {
  std::ostringstream os;
  os << "degree=" << degree_ << ";box=" << box_bound_ << ";label=" << label_ << ";format=1\n";
  for (const auto& [k, v] : coeffs_) os << k.str() << ';' << v << '\n';
  return os.str();
}

QExpansion QExpansion::parse(std::string_view text) {
  auto nl = text.find('\n');
  auto header = text.substr(0, nl);
  if (field(header, "format") != "1") throw InvalidArgument("unsupported expansion format");
  QExpansion q(std::stoi(field(header, "degree")), std::stoi(field(header, "box")), field(header, "label"));
  std::size_t pos = nl == std::string_view::npos ? text.size() : nl + 1;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    auto semi = line.find(';');
    if (semi == std::string_view::npos) throw InvalidArgument("malformed expansion record");
    q.set(CanonicalKey::parse(line.substr(0, semi)), Integer(std::string(line.substr(semi + 1))));
  }
  return q;
}

long residue(const Integer& v, long p) {
  Integer r = v % p;
  if (r < 0) r += p;
  return r.get_si();
}

BoxComparison qexp_congruent(const QExpansion& f1, const QExpansion& f2, int p, int bound) {
  if (p < 2) throw InvalidArgument("modulus must be >= 2");
  if (f1.degree() != f2.degree()) throw InvalidArgument("expansions have different degrees");
  if (f1.box_bound() < bound || f2.box_bound() < bound)
    throw BoxUnderflow("expansion box " + std::to_string(std::min(f1.box_bound(), f2.box_bound())) +
                       " does not cover bound " + std::to_string(bound));
  BoxComparison out;
  out.prime = p;
  out.bound = bound;
  for (const auto& key : psd_classes(f1.degree(), bound)) {
    auto a = f1.coefficients().find(key);
    auto b = f2.coefficients().find(key);
    if (a == f1.coefficients().end() || b == f2.coefficients().end())
      throw InvalidArgument("class " + key.str() + " missing from " +
                            (a == f1.coefficients().end() ? f1.label() : f2.label()));
    ++out.classes_checked;
    if (residue(a->second - b->second, p) != 0) out.mismatches.push_back({key, a->second, b->second});
  }
  return out;
}

}  // namespace thetacong
