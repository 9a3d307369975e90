#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "comonotone/estimate.hpp"
#include "comonotone/lab.hpp"
#include "comonotone/process.hpp"

namespace comonotone {

enum class BarrierKind { DownIn, DownOut, UpIn, UpOut };

const char* to_string(BarrierKind kind);
/// Parses "DownIn", "DownOut", "UpIn", "UpOut"; throws DomainError otherwise.
BarrierKind barrier_kind_from_string(const std::string& name);

/// Call with strike K gated by the running extremum over the monitored grid
/// nodes: DownIn 1{min <= L}, DownOut 1{min > L}, UpIn 1{max > L}, UpOut 1{max <= L}.
struct BarrierSpec {
  BarrierKind kind = BarrierKind::DownIn;
  double strike = 1.0;
  double barrier = 1.0;
  /// Monitor only nodes with time in [first, second]; all nodes when empty.
  std::optional<std::pair<double, double>> window;
  /// Deterministic discount factor applied to every payoff.
  double discount = 1.0;

  /// K > 0, L >= 0, discount > 0, window inside [0, T].
  void validate(const TimeGrid& grid) const;
  /// Down barriers need L < s0, up barriers L > s0.
  void validate_against_spot(double s0) const;
};

/// Payoffs of one path for a barrier family.
struct BarrierPayoff {
  double vanilla = 0.0;
  double knock_in = 0.0;   // DownIn or UpIn payoff
  double knock_out = 0.0;  // DownOut or UpOut payoff
  double crossed = 0.0;    // 1 when the "in" event holds
  double extremum = 0.0;   // min (down) or max (up) over the monitored nodes
};

BarrierPayoff barrier_payoff(const Path& path, const BarrierSpec& spec);

struct BarrierPrice {
  MCEstimate barrier;
  MCEstimate vanilla;
  std::size_t negative_paths = 0;  // paths with a negative value (financial reading questionable)
};

BarrierPrice price_barrier(const Process& process, const BarrierSpec& spec, const RunOptions& options);

enum class BoundSide { LessEqual, GreaterEqual };
const char* to_string(BoundSide side);

/// Bound of barrier price against Call * P(event) or its smoothed analogue.
struct BoundRow {
  std::string name;
  double lhs = 0.0;  // barrier price or E[call * smoothed indicator]
  double rhs = 0.0;  // Call * P(event) or Call * E[smoothed indicator]
  double slack = 0.0;  // rhs - lhs for "<=", lhs - rhs for ">="
  double std_error = 0.0;  // delta-method standard error of the slack
  Verdict verdict = Verdict::Inconclusive;
};

struct BoundReport {
  BarrierSpec spec;
  MCEstimate barrier;
  MCEstimate vanilla;
  MCEstimate crossing;  // P(event of the barrier kind)
  BoundSide side = BoundSide::LessEqual;
  BoundRow sharp;
  std::vector<BoundRow> smoothed;  // eps = 1e-2, 1e-4
  double parity_residual = 0.0;    // max_i |in_i + out_i - vanilla_i| / scale
  std::size_t negative_paths = 0;
};

/// All quantities on common paths. The verdict is "consistent" iff the slack
/// is >= -z * its standard error.
BoundReport verify_bounds(const Process& process, const BarrierSpec& spec, const RunOptions& options);

struct BarrierLadder {
  std::vector<double> barriers;  // ascending
  std::vector<MCEstimate> prices;
  /// Every path's payoff moves monotonically along the ladder: non-decreasing
  /// in L for DownIn and UpOut, non-increasing for DownOut and UpIn.
  bool pathwise_monotone = true;
};

/// Barrier prices along a ladder of levels on common paths.
BarrierLadder barrier_ladder(const Process& process, BarrierSpec spec, std::vector<double> barriers,
                             const RunOptions& options);

}  // namespace comonotone
