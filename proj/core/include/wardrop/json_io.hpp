#pragma once

#include "wardrop/equilibrium.hpp"
#include "wardrop/series_parallel.hpp"
#include "wardrop/signaling.hpp"
#include "wardrop/support_enum.hpp"
#include "wardrop/types.hpp"

namespace wardrop {

// Serialization keeps nlohmann/json out of the public headers; everything
// here speaks strings.

std::string instance_to_json(const Instance& inst);

/// Parses the instance schema
/// {"states", "prior", "vertices", "edges":[{"id","tail","head","slope",
///  "offset"}], "commodities":[{"source","target","demand","allowed_edges"?}]}.
/// Throws ParseError on malformed documents.
Instance instance_from_json(const std::string& text);

std::string equilibrium_to_json(const Instance& inst, const EquilibriumResult& res);

/// {"signals":[{"phi","posterior","cost","mass"}], "total_cost"}
std::string scheme_to_json(const SchemeEvaluation& evaluation);

std::string atlas_to_json(const Instance& inst, const SupportAtlas& atlas);

/// CSV columns: alpha_lo, alpha_hi, cost_lo, cost_hi, support
/// (edge ids ';'-joined, commodities '|'-joined).
std::string atlas_to_csv(const Instance& inst, const SupportAtlas& atlas);

std::string decomposition_to_json(const Instance& inst, const SpDecomposition& dec);

/// Minimal static SVG polyline of a cost profile with breakpoint markers.
std::string profile_to_svg(const CostProfile& profile);

}  // namespace wardrop
