// The acceptance gate behind `dfsaqc verify`.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dfsaqc/spinlab.hpp"

namespace dfsaqc {

enum class Suite { Fast, Full };

Suite parse_suite(const std::string& text);

struct CriterionResult {
  std::string id;        ///< "1".."11", or "sign-flip"
  std::string title;
  bool pass = false;
  std::string measured;  ///< human-readable measured values
  double seconds = 0.0;
};

struct AcceptanceOptions {
  Suite suite = Suite::Fast;
  /// The sign-flip unitary under test; replaced in mutation tests.
  std::function<Operator(int)> sign_flip;
  /// Only run these ids (empty = whole suite).
  std::vector<std::string> only;
};

/// Criterion ids in a suite. Fast keeps the criteria whose runtime budget is
/// at most one minute; full runs everything.
std::vector<std::string> suite_ids(Suite suite);

/// Runs the suite; `on_result` (optional) sees each result as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// `[PASS] 3  closed-form Grover  (...)`
std::string format_line(const CriterionResult& r);
/// One JSON object per line.
std::string to_json_line(const CriterionResult& r);

}  // namespace dfsaqc
