#pragma once

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "exosc/io.hpp"
#include "exosc/models.hpp"

namespace exosc {

// Strict decimal parse of the whole string. DomainError otherwise.
double parse_number(const std::string& s);

// "lo:hi:n" gives n evenly spaced values (n >= 1; n = 1 means lo only).
// A plain number gives a single value.
std::vector<double> parse_grid(const std::string& spec);

// Comma separated numbers, e.g. "0.1,0.05".
std::vector<double> parse_list(const std::string& spec);

// Flat key=value lines; '#' starts a comment, blank lines are skipped and a
// leading "--" on the key is dropped. DomainError on a malformed line.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

// Inserts "--key value" for every config pair whose key is not already given
// as a flag in `args` (flags override the file). `args` excludes argv[0].
std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const std::vector<std::pair<std::string, std::string>>& cfg);

// EXOSC_THREADS when set to a positive integer, otherwise the hardware count (at least 1).
unsigned env_threads();

// One grid point of a sweep. `values` maps axis name to value.
struct SweepPoint {
  std::size_t index = 0;
  std::map<std::string, double> values;
};

struct SweepResultRow {
  std::size_t index = 0;
  std::map<std::string, double> values;
  std::string classification;
  std::optional<double> fixed_point_x, period, hausdorff, floquet;
  std::string error;  // non-empty marks a failed point
};

Json to_json(const SweepResultRow& r);
SweepResultRow sweep_row_from_json(const Json& j);

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

// Cartesian product, last axis fastest.
std::vector<SweepPoint> sweep_grid(const std::vector<SweepAxis>& axes);

// Text identifying a grid and the fixed settings; stored as the journal header.
std::string sweep_signature(const std::vector<SweepAxis>& axes, const std::string& extra);

using SweepFn = std::function<SweepResultRow(const SweepPoint&)>;

struct SweepOutcome {
  std::vector<SweepResultRow> rows;  // by index
  std::size_t resumed = 0;           // rows taken from the journal
  std::size_t failed = 0;
};

// Evaluates every point not yet in the journal with up to `threads` workers.
// Each finished row is appended to the journal (serialized) before the next
// is taken, so an interrupted run resumes where it stopped. An exception
// from `fn` becomes a row with classification "Error". DomainError if the
// journal header does not match `signature`. An empty journal_path disables
// journaling.
SweepOutcome run_sweep(const std::vector<SweepAxis>& axes, const std::string& signature, const SweepFn& fn,
                       const std::string& journal_path, unsigned threads);

// Header: index, axis names, classification, fixed_point_x, period, hausdorff, floquet, error.
void write_sweep_csv(std::ostream& os, const std::vector<SweepAxis>& axes, const std::vector<SweepResultRow>& rows);

}  // namespace exosc
