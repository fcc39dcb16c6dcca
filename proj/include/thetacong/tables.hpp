#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thetacong/forms.hpp"
#include "thetacong/theta.hpp"

namespace thetacong {

/// Expected values of one published table, as stored in the versioned
/// fixture file (data/expected_tables.json, embedded at build time).
struct ExpectedRow {
  std::string name;
  std::optional<HalfIntegralMatrix> t;  // empty for the Coxeter table
  std::vector<std::string> printed;     // as printed, e.g. "2^8*3^8*11"
  std::vector<Integer> expected;
  /// Set when the printed row is internally inconsistent; such rows are
  /// shown but do not count toward the verdict.
  std::optional<std::string> anomaly;
};

struct ExpectedTable {
  std::string id;
  std::string citation;
  std::string kind;      // "coefficients" or "coxeter"
  std::string notation;  // "binary", "ternary", "ozeki4"
  int degree = 0;
  std::vector<std::string> columns;  // lattice names
  std::vector<ExpectedRow> rows;
};

const std::vector<ExpectedTable>& expected_tables();
const std::string& fixtures_version();
/// InvalidArgument for unknown ids.
const ExpectedTable& expected_table(const std::string& id);

/// "2^8*3^8*5^3" -> 1679616000; plain decimal strings pass through.
Integer parse_factored(const std::string& text);

/// Index in one of the tuple notations: binary a,b,c; ternary a,b,c,d,e,f;
/// ozeki4 ten-tuple.
HalfIntegralMatrix decode_notation(const std::string& notation, const std::vector<int>& tuple);

struct TableCell {
  std::string column;
  std::string printed;
  Integer expected;
  Integer computed;
  bool match = false;
};

struct ReproducedRow {
  std::string name;
  std::string index;  // canonical key, empty for the Coxeter table
  Integer d_t;
  std::vector<TableCell> cells;
  std::string status;  // "match", "mismatch", "anomaly"
  std::string note;
};

struct TableReport {
  std::string id;
  std::string citation;
  std::string version;
  std::vector<ReproducedRow> rows;

  bool pass() const;
  std::string to_text() const;
  std::string to_json() const;
  std::string to_csv() const;
};

/// Recomputes a stored table. `rows` restricts to the named rows (e.g.
/// "d64"); unknown names throw InvalidArgument.
TableReport reproduce_table(ThetaEngine& engine, const std::string& id, const std::vector<std::string>& rows = {});

}  // namespace thetacong
