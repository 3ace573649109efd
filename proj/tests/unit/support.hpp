#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hv/fock.hpp"
#include "hv/frobenius.hpp"
#include "hv/operators.hpp"

namespace hvtest {

using namespace hv;

inline GradedClass cls(const ModelPtr& m, std::string_view label) { return m->basis_class(m->index(label)); }

/// Signed canonical state of a creation word, e.g. {{2,"h"},{1,"x"}}.
inline FockVector word(const ModelPtr& m, const std::vector<std::pair<int, std::string>>& w, Rational c = 1) {
  auto [sign, mono] = normalize(w, *m);
  return FockVector::of(mono, c * sign);
}

inline FockVector vac() { return FockVector::vacuum(); }

/// Dimensions of each level up to max_level read off the product
/// prod_{n>=1, b} (1 - x^n)^{-1} (even b) or (1 + x^n) (odd b), keeping the
/// cohomological degree 2n - 2 + |b| as a second variable.
inline std::vector<std::vector<long>> generating_function_betti(const SurfaceModel& m, int max_level) {
  const int maxdeg = 4 * max_level + 1;
  std::vector<std::vector<long>> p(static_cast<std::size_t>(max_level) + 1, std::vector<long>(maxdeg, 0));
  p[0][0] = 1;
  for (int n = 1; n <= max_level; ++n) {
    for (Label b = 0; b < m.dim(); ++b) {
      const int d = 2 * n - 2 + m.degree(b);
      if (m.odd(b)) {
        for (int l = max_level; l >= n; --l) {
          for (int i = maxdeg - 1; i >= d; --i) p[l][i] += p[l - n][i - d];
        }
      } else {
        for (int l = n; l <= max_level; ++l) {
          for (int i = d; i < maxdeg; ++i) p[l][i] += p[l - n][i - d];
        }
      }
    }
  }
  return p;
}

}  // namespace hvtest
