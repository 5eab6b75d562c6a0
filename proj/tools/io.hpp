#pragma once

// JSON encodings of couples, elements, curves, parameters and results.
// Infinite numbers are written as the string "inf".

#include "kdiv/cm_lab.hpp"
#include "kdiv/divisibility.hpp"
#include "kdiv/kmethod.hpp"
#include "kdiv/lattice.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>

namespace kdiv::io {

using nlohmann::json;

/// Parses inline JSON, or the contents of a file when the text starts
/// with '@'. Throws ValidationError on malformed input.
json parse(const std::string& text);

double number(const json& j);
json number(double v);
VecXd vector(const json& j);
json vector(const VecXd& v);

Grid grid(const json& j);
/// "min,max,per_octave" or a grid object.
Grid grid(const std::string& text);
json to_json(const Grid& g);

CoupleDescriptor couple(const json& j);
json to_json(const CoupleDescriptor& c);

Element element(const json& j);
json to_json(const Element& x);

Leg leg(const json& j);
json to_json(const Leg& l);

/// {"t": [...], "y": [...], "slope": s}.
ConcavePL curve(const json& j);
json to_json(const ConcavePL& f);

ParameterLattice parameter(const json& j, const Grid& default_grid);
json to_json(const ParameterLattice& E);

json to_json(const ParameterNorm& n);
json to_json(const SplitWitness& w);
json to_json(const DivisibilityCertificate& c);
json to_json(const OperatorWitness& w);
json to_json(const MonotonicityEstimate& e);
json to_json(const Convexified& c);
json to_json(const EHatResult& r);

/// 17 significant digits; "inf" and "-inf" for infinities.
std::string format(double v);

}  // namespace kdiv::io
