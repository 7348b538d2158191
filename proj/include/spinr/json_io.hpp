#pragma once

// JSON fixtures: row-major flattening for real tensors, [re, im] pairs for
// complex entries, objects with sorted keys (deterministic serialization).

#include <string>
#include <vector>

#include "json.hpp"
#include "spinr/curvature.hpp"
#include "spinr/spinlab.hpp"
#include "spinr/verify.hpp"

namespace spinr {

using Json = nlohmann::json;

Json curvature_to_json(const CurvatureTensor& R);
CurvatureTensor curvature_from_json(const Json& j);

Json sym_to_json(const RMat& h);
RMat sym_from_json(const Json& j);

Json symbol_to_json(const SecondDerivSymbol& T);
SecondDerivSymbol symbol_from_json(const Json& j);

Json spinor_to_json(const Spinor& psi);
Spinor spinor_from_json(const Json& j);

Json theta_to_json(const TwoFormFamily& f);
TwoFormFamily theta_from_json(const Json& j);

// The representation is stored by its parameters and rebuilt on load.
Json datum_to_json(const GeometricDatum& datum);
GeometricDatum datum_from_json(const Json& j);

Json report_to_json(const VerificationReport& r);
Json reports_to_json(const std::vector<VerificationReport>& rs);

void save_json(const std::string& path, const Json& j);
Json load_json(const std::string& path);

}  // namespace spinr
