#pragma once

#include <string>
#include <vector>

#include "hv/operators.hpp"

namespace hv {

struct SpanReport {
  int n = 0;
  std::size_t generators = 0;
  std::size_t achieved = 0;
  std::size_t ambient = 0;
  bool pass = false;  ///< achieved == ambient
  std::size_t rounds = 0;

  std::string str() const;
  std::string json() const;
};

struct SpanResult {
  std::vector<FockVector> basis;  ///< independent vectors spanning the closure
  SpanReport report;
};

/// (1/n!) q_1(1)^n |0>, the fundamental class of X^[n].
FockVector unit_vector(int n, const SurfaceModel& m);

/// {-W^{k+2}_0(e) : 0 <= k < n, e a basis class}, ordered by k, then class.
std::vector<Operator> generators(int n, const ModelPtr& model);

/// Smallest subspace of H_level containing the seeds and closed under the ops.
/// Throws UsageError for a seed off the level or an op with nonzero level shift.
SpanResult span_closure(const std::vector<FockVector>& seeds, const std::vector<Operator>& ops, int level,
                        const SurfaceModel& m);

SpanReport check_generation(int n, const ModelPtr& model);

}  // namespace hv
