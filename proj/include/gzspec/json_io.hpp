// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include "gzspec/linalg.hpp"
#include "gzspec/operator_model.hpp"
#include "gzspec/spectrum_model.hpp"

namespace gzspec {

using Json = nlohmann::ordered_json;

// Rationals serialize as strings "p/q"; complex values as ["p/q", "r/s"].
Json to_json(const Rational& q);
Json to_json(const ExactComplex& z);
Rational rational_from_json(const Json& j);
ExactComplex exact_complex_from_json(const Json& j);

Json to_json(const TailSpec& tail);
TailSpec tail_from_json(const Json& j);

Json to_json(const Cluster& c);
Cluster cluster_from_json(const Json& j);

Json to_json(const SpectrumModel& s);
SpectrumModel spectrum_model_from_json(const Json& j);

Json to_json(const SpectralSetSelection& sel);
SpectralSetSelection selection_from_json(const Json& j);

// {"rows": r, "cols": c, "entries": [[re, im], ...]} row-major, doubles.
Json matrix_to_json(const ComplexMatrix& a);
ComplexMatrix matrix_from_json(const Json& j);

// {"variant": "matrix" | "diagonal" | "shift" | "direct_sum" | "affine" |
//  "power" | "perturbation", ...}
Json to_json(const OperatorModel& m);
OperatorModel operator_model_from_json(const Json& j);

}  // namespace gzspec
