#pragma once

#include <cstdint>
#include <map>

#include "wardrop/types.hpp"

namespace wardrop {

struct UnsupportedJ : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// CLI-addressable generator spec, e.g. "nested_braess:j=2,eps=1e-6" or
/// "sioux:file=net.tntp,tau=0.5,seed=7".
struct GeneratorSpec {
  std::string family;
  std::map<std::string, std::string> params;

  static GeneratorSpec parse(const std::string& text);
  double number(const std::string& key, double fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
};

/// Families: example1, example2, example3, braess, nested_braess(j,eps),
/// exp_supports(j,eps), sioux(file,tau,seed,gamma,...), sioux_mixed(...).
/// Throws BadParameter on out-of-range parameters.
Instance build(const GeneratorSpec& spec);

Instance make_example1();
Instance make_example2();
Instance make_example3();
Instance make_braess();

/// Nested Braess graph: 2j+2 vertices, 4j+1 edges, slope-1 chain with an
/// eps-slope center edge and constant cross edges with offsets 10^(j-1-i).
/// Costs are state-independent (two identical states).
Instance make_nested_braess(int j, double eps = 1e-6, double demand = 1.0);

/// The nested Braess graph rescaled by 10^(1-j)/3 on the cross offsets (and
/// on eps), plus the bypass edge e* = (s,t) with offsets (0, 1) -- the only
/// state-dependent edge. Demand 1.
Instance make_exp_supports(int j, double eps = 1e-6);

/// Closed-form per-unit equilibrium cost of the j=1 nested Braess graph:
/// d(2+eps) up to 1/(1+eps), (2+eps(d+2))/(1+2eps) up to 2, then 1+d/2.
/// Reference oracle; throws UnsupportedJ for j != 1.
double nested_braess_cost(int j, double demand, double eps = 1e-6);

}  // namespace wardrop
