#include "thetacong/tables.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "thetacong/errors.hpp"
#include "thetacong/lattice.hpp"

namespace thetacong {

namespace {

const char* kFixtureText =
#include "expected_tables.inc"
    ;

struct Fixtures {
  std::string version;
  std::vector<ExpectedTable> tables;
};

const Fixtures& fixtures() {
  static const Fixtures f = [] {
    Fixtures out;
    const auto j = nlohmann::json::parse(kFixtureText);
    if (j.at("format").get<int>() != 1) throw CorruptCache("unsupported fixture format");
    out.version = j.at("version").get<std::string>();
    for (const auto& jt : j.at("tables")) {
      ExpectedTable t;
      t.id = jt.at("id").get<std::string>();
      t.citation = jt.at("citation").get<std::string>();
      t.kind = jt.at("kind").get<std::string>();
      t.notation = jt.value("notation", "");
      t.degree = jt.value("degree", 0);
      t.columns = jt.at("columns").get<std::vector<std::string>>();
      for (const auto& jr : jt.at("rows")) {
        ExpectedRow r;
        r.name = jr.at("name").get<std::string>();
        if (jr.contains("t")) r.t = decode_notation(t.notation, jr.at("t").get<std::vector<int>>());
        r.printed = jr.at("values").get<std::vector<std::string>>();
        for (const auto& v : r.printed) r.expected.push_back(parse_factored(v));
        if (jr.contains("anomaly")) r.anomaly = jr.at("anomaly").get<std::string>();
        if (r.printed.size() != t.columns.size()) throw CorruptCache("fixture row " + r.name + " has wrong width");
        t.rows.push_back(std::move(r));
      }
      out.tables.push_back(std::move(t));
    }
    return out;
  }();
  return f;
}

}  // namespace

const std::vector<ExpectedTable>& expected_tables() { return fixtures().tables; }

const std::string& fixtures_version() { return fixtures().version; }

const ExpectedTable& expected_table(const std::string& id) {
  for (const auto& t : expected_tables())
    if (t.id == id) return t;
  std::string known;
  for (const auto& t : expected_tables()) known += (known.empty() ? "" : ", ") + t.id;
  throw InvalidArgument("unknown table '" + id + "' (known: " + known + ")");
}

Integer parse_factored(const std::string& text) {
  Integer value = 1;
  std::stringstream ss(text);
  std::string factor;
  bool any = false;
  while (std::getline(ss, factor, '*')) {
    const auto caret = factor.find('^');
    const std::string base = factor.substr(0, caret);
    if (base.empty() || base.find_first_not_of("0123456789") != std::string::npos)
      throw InvalidArgument("bad factor '" + factor + "' in '" + text + "'");
    unsigned long exp = 1;
    if (caret != std::string::npos) exp = std::stoul(factor.substr(caret + 1));
    Integer b(base);
    Integer p;
    mpz_pow_ui(p.get_mpz_t(), b.get_mpz_t(), exp);
    value *= p;
    any = true;
  }
  if (!any) throw InvalidArgument("empty value");
  return value;
}

HalfIntegralMatrix decode_notation(const std::string& notation, const std::vector<int>& v) {
  if (notation == "binary" && v.size() == 3) return decode_binary(v[0], v[1], v[2]);
  if (notation == "ternary" && v.size() == 6) return decode_ternary(v[0], v[1], v[2], v[3], v[4], v[5]);
  if (notation == "ozeki4" && v.size() == 10) {
    std::array<int, 10> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return decode_ozeki4(a);
  }
  throw InvalidArgument("tuple of length " + std::to_string(v.size()) + " does not fit notation '" + notation + "'");
}

bool TableReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.status != "mismatch"; });
}

TableReport reproduce_table(ThetaEngine& engine, const std::string& id, const std::vector<std::string>& wanted) {
  const ExpectedTable& table = expected_table(id);
  for (const auto& w : wanted)
    if (std::none_of(table.rows.begin(), table.rows.end(), [&](const auto& r) { return r.name == w; }))
      throw InvalidArgument("table " + id + " has no row '" + w + "'");

  TableReport report;
  report.id = table.id;
  report.citation = table.citation;
  report.version = fixtures_version();
  for (const ExpectedRow& row : table.rows) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), row.name) == wanted.end()) continue;
    ReproducedRow out;
    out.name = row.name;
    bool all = true;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      TableCell cell;
      cell.column = table.columns[c];
      cell.printed = row.printed[c];
      cell.expected = row.expected[c];
      const Label label = parse_label(table.columns[c]);
      if (table.kind == "coxeter") {
        cell.computed = coxeter_number(label);
      } else {
        cell.computed = engine.coefficient(build_lattice(label), *row.t);
      }
      cell.match = cell.computed == cell.expected;
      all = all && cell.match;
      out.cells.push_back(std::move(cell));
    }
    if (row.t) {
      out.index = canonical_key(*row.t).str();
      out.d_t = discriminant(*row.t);
    }
    if (row.anomaly) {
      out.status = "anomaly";
      out.note = *row.anomaly;
    } else {
      out.status = all ? "match" : "mismatch";
    }
    report.rows.push_back(std::move(out));
  }
  return report;
}

std::string TableReport::to_text() const {
  std::ostringstream os;
  os << id << ": " << citation << " [fixtures " << version << "]\n";
  for (const auto& r : rows) {
    os << "  " << std::left << std::setw(14) << r.name;
    if (!r.index.empty()) os << " d_T=" << std::setw(4) << r.d_t;
    for (const auto& c : r.cells) {
      os << "  " << c.column << ": " << c.computed;
      if (!c.match) os << " (expected " << c.printed << ")";
    }
    os << "  " << r.status;
    if (!r.note.empty()) os << " -- " << r.note;
    os << "\n";
  }
  os << (pass() ? "all rows match" : "MISMATCH") << "\n";
  return os.str();
}

std::string TableReport::to_json() const {
  nlohmann::json j;
  j["table"] = id;
  j["citation"] = citation;
  j["fixtures_version"] = version;
  j["verdict"] = pass() ? "pass" : "fail";
  auto& arr = j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row = {{"name", r.name}, {"status", r.status}};
    if (!r.index.empty()) {
      row["key"] = r.index;
      row["d_T"] = r.d_t.get_str();
    }
    if (!r.note.empty()) row["note"] = r.note;
    auto& cells = row["cells"] = nlohmann::json::array();
    for (const auto& c : r.cells)
      cells.push_back({{"column", c.column},
                       {"printed", c.printed},
                       {"expected", c.expected.get_str()},
                       {"computed", c.computed.get_str()},
                       {"match", c.match}});
    arr.push_back(std::move(row));
  }
  return j.dump(2);
}

std::string TableReport::to_csv() const {
  std::ostringstream os;
  os << "table,row,key,d_T,column,expected,computed,match,status\n";
  for (const auto& r : rows)
    for (const auto& c : r.cells)
      os << id << ",\"" << r.name << "\",\"" << r.index << "\"," << r.d_t << "," << c.column << "," << c.expected
         << "," << c.computed << "," << (c.match ? "yes" : "no") << "," << r.status << "\n";
  return os.str();
}

}  // namespace thetacong
