#pragma once

#include <cstdint>

#include "wardrop/types.hpp"

namespace wardrop {

/// Cost construction for TNTP networks: a_e = gamma * t_e / C_e,
/// b^theta1_e = t_e, and b^theta2_e drawn U(offset_lo, offset_hi) on a
/// seeded round(tau * |E|)-subset of edges (b^theta2 = b^theta1 elsewhere).
///
/// The RNG stream is documented and stable: first a Fisher-Yates shuffle
/// selects the randomized subset, then offsets are drawn for the selected
/// edges in file order. `mixed` switches to the symmetric variant: every
/// selected edge keeps t_e in one uniformly chosen state and draws the
/// other.
struct TntpOptions {
  double gamma = 0.15;
  double tau = 0.0;
  std::uint64_t seed = 42;
  double offset_lo = 1.0;
  double offset_hi = 15.0;
  bool mixed = false;
};

struct TntpResult {
  Instance instance;  // two states, no commodities attached
  int randomized_edges = 0;
};

/// Parses the TNTP net format: lines starting with '~' or '<' are skipped,
/// columns init_node, term_node, capacity, free_flow_time are read, others
/// ignored. Throws ParseError (with line number) on malformed rows or an
/// empty file, MissingField when capacity or free-flow time is absent.
TntpResult parse_tntp(const std::string& network_text, const TntpOptions& options = {});

}  // namespace wardrop
