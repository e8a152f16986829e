#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kemweb/classify.hpp"
#include "kemweb/canonical.hpp"
#include "kemweb/constcurv.hpp"
#include "kemweb/errors.hpp"
#include "kemweb/separability.hpp"

namespace kemweb {

/// Malformed input. Positions are 1-based; `expected` is never empty.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column, std::set<std::string> expected);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::set<std::string> expected_;
};

class UndeclaredCoordinate : public ParseError {
 public:
  using ParseError::ParseError;
};

class DuplicateDeclaration : public ParseError {
 public:
  using ParseError::ParseError;
};

/// A line that belongs to a different body mode than the declared one.
class MixedMode : public ParseError {
 public:
  using ParseError::ParseError;
};

enum class FileMode { Raw, Sigma, Family, Warped };

const char* file_mode_name(FileMode mode);

struct BlockLine {
  std::vector<int> coords;
  std::optional<Expr> param;  // e (warped, sckt) or sigma (irregular)
};

struct FiberLine {
  std::vector<int> coords;
  Expr rho;
};

/// Parsed description file. Expressions use the declared coordinate indices.
struct MetricFile {
  std::vector<std::string> coords;
  std::vector<Interval> domains;
  std::vector<int> signs;
  FileMode mode = FileMode::Raw;

  std::vector<std::optional<Expr>> gii;   // raw, warped
  std::vector<std::optional<Expr>> phi;   // sigma, family
  std::vector<std::optional<Expr>> sigma; // n x n; sigma, family
  std::string family;                     // family
  std::vector<std::optional<Expr>> eigen; // family
  std::vector<int> base;                  // family (irregular), warped
  std::vector<BlockLine> blocks;          // family
  std::vector<FiberLine> fibers;          // warped

  std::size_t dim() const { return coords.size(); }
  ChartBox box() const { return ChartBox(domains); }
};

MetricFile parse_metric_file(const std::string& text);

/// Canonical text of a parsed file; parsing it yields an equal file.
std::string print_metric_file(const MetricFile& f);

bool same_metric_file(const MetricFile& a, const MetricFile& b);

/// Parses one expression over the given coordinate names.
Expr parse_expression(const std::string& text, const std::vector<std::string>& coords);

/// The metric described by any mode (warped: the assembled metric).
OrthogonalMetric metric_from_file(const MetricFile& f, const SampleOptions& check = {});

/// Sigma and family modes.
SigmaWeb web_from_file(const MetricFile& f);

/// Family modes irreducible, warped and sckt (and product with e per block).
SCKTData sckt_from_file(const MetricFile& f);

WarpedProductStructure warped_from_file(const MetricFile& f);

// ---------------------------------------------------------------------------
// Reports.

struct NamedValue {
  std::string name;
  double value = 0.0;
};

/// Everything a command produced; serialization is deterministic.
struct Report {
  std::string command;
  std::string input_digest;
  std::optional<SampleOptions> options;
  std::vector<std::string> coordinates;
  std::vector<ConditionReport> conditions;
  std::optional<ResidualReport> residuals;
  std::optional<ClassificationTree> classification;
  std::vector<NamedValue> values;
  std::vector<std::string> messages;
  std::string verdict;
};

enum class ReportFormat { Json, Text };

std::string emit_report(const Report& r, ReportFormat format);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string input_digest(const std::string& text);

const char* version_string();

}  // namespace kemweb
