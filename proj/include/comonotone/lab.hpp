#pragma once

#include <cstddef>
#include <cstdint>

namespace comonotone {

/// Budget and reproducibility settings shared by the statistical labs.
struct RunOptions {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0: COMONOTONE_WORKERS or hardware concurrency
  double z = 4.0;        // one-sided threshold in standard errors
};

enum class Verdict { Consistent, Violation, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Violation: return "violation";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

}  // namespace comonotone
