#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hv/operators.hpp"

namespace hv {

enum class Status { Pass, Fail, Skip, Incomplete };

std::string_view status_name(Status s);

struct CheckParams {
  int level = 3;        ///< N: basis monomials of level <= N
  int index_bound = 2;  ///< B: mode indices with |n| <= B
  int depth = -1;       ///< k bound of the nested and W checks; -1 picks the per-check default
  double time_limit = 0;  ///< seconds; 0 means unlimited. Exceeding it yields Incomplete.
};

struct CheckReport {
  std::string id;
  std::string model;
  CheckParams params;
  Status status = Status::Pass;
  std::size_t instances = 0;  ///< identity instances verified (or skipped by a verified zero prefix)
  std::size_t pruned = 0;     ///< of those, instances settled by a vanishing inner commutator
  std::string instance;       ///< the failing instance, as an expression
  std::optional<Mismatch> mismatch;
  std::string note;
  double seconds = 0;

  /// "N=3 B=2" plus "k=3" for checks that use the depth.
  std::string param_str() const;
  /// "CHECK <id> <params> PASS|FAIL|SKIP|INCOMPLETE [witness=...]".
  std::string line(const SurfaceModel& m) const;
};

struct SuiteReport {
  std::string model;
  std::vector<CheckReport> checks;

  std::size_t count(Status s) const;
  /// 0 iff no check failed.
  int exit_code() const;
};

/// All check ids in report order.
const std::vector<std::string>& check_ids();
/// Whether the check uses the depth parameter, and its default.
std::optional<int> default_depth(std::string_view id);

/// Runs one identity over all index tuples within B and all basis classes,
/// comparing both sides on every basis monomial of level <= N.
/// Throws UsageError for an unknown id or bounds out of range.
CheckReport run_check(std::string_view id, const ModelPtr& model, const CheckParams& params);

/// Runs the checks (in parallel across ids); reports keep the order of `ids`.
SuiteReport run_suite(const std::vector<std::string>& ids, const ModelPtr& model, const CheckParams& params);

std::string to_text(const SuiteReport& r, const SurfaceModel& m);
std::string to_json(const SuiteReport& r, const SurfaceModel& m);

}  // namespace hv
