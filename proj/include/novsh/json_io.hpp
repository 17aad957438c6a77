#pragma once

#include <json.hpp>
#include <string>

#include "novsh/homology.hpp"
#include "novsh/topology.hpp"

namespace novsh {

using Json = nlohmann::json;

/// Reads and parses a JSON file. Unreadable files and syntax errors both
/// surface as std::invalid_argument so callers have a single parse-failure
/// path.
Json load_json_file(const std::string& path);

// ---------------------------------------------------------------------------
// Input schemas. All parsers throw std::invalid_argument on missing fields,
// wrong types, out-of-range indices, or shape mismatches.
// ---------------------------------------------------------------------------

/// { "rows", "cols", "num_vars",
///   "entries": [ { "row", "col",
///                  "terms": [ { "exp": [int...], "re": f, "im": f } ] } ] }
/// Omitted entries are zero; "im" (and "re") default to 0.
LaurentMatrix laurent_matrix_from_json(const Json& j);

/// { "rank_src", "rank_dst",
///   "alpha": LaurentMatrix-JSON
///          | { "symbol": "abs_power", "center_angle": theta, "nu": nu } }
VirtualModule module_from_json(const Json& j);

/// { "num_vars", "ranks": [..],
///   "boundaries": [ { "degree": i, "matrix": LaurentMatrix-JSON } ],
///   "orientable_manifold": bool (optional) }
/// Boundaries absent from the list are zero maps of the implied shape.
FreeChainComplex complex_from_json(const Json& j);

/// { "dim", "generators": [ matrix... ] } where a matrix is an array of
/// rows and each entry is either a plain number or { "re": f, "im": f }.
/// The representation is validated (square, unitary, commuting).
UnitaryRep rep_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Output serialization. Non-finite doubles become the strings "inf",
// "-inf", "nan" (JSON itself has no encoding for them).
// ---------------------------------------------------------------------------

Json to_json(const LaurentMatrix& m);
/// Only modules whose symbol has an exact Laurent representation serialize;
/// others throw std::invalid_argument.
Json to_json(const VirtualModule& x);
Json to_json(const FreeChainComplex& c);
Json to_json(const UnitaryRep& rep);
Json to_json(const SpectralDensity& d);
Json to_json(const NSFit& fit);
Json to_json(const ValidationReport& r);
Json to_json(const DegreeHomology& h);
Json to_json(const HomologyReport& r);
Json to_json(const MuUpperCertificate& c);
Json to_json(const MuBounds& b);
Json to_json(const MorseReport& r);
Json to_json(const TorModuleReport& r);
Json to_json(const TorDecompositionReport& r);

/// Two-column table with header "lambda,F", full double precision.
std::string density_csv(const SpectralDensity& d);

}  // namespace novsh
