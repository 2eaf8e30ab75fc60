#pragma once

#include "json.hpp"

#include "qtomo/injectivity.hpp"
#include "qtomo/measurement.hpp"
#include "qtomo/recovery.hpp"
#include "qtomo/varieties.hpp"

namespace qtomo {

using Json = nlohmann::ordered_json;

/// {"re": [...], "im": [...]}
Json complex_vector_json(const CVector& v);
CVector complex_vector_from_json(const Json& j);
Json real_vector_json(const RVector& v);
RVector real_vector_from_json(const Json& j);

/// Non-finite numbers become null.
Json number_json(double v);

Json to_json(const MeasurementVector& mv);
MeasurementVector measurement_vector_from_json(const Json& j);

Json to_json(const CollisionWitness& w);
/// Omits wall_time_ms when include_timing is false.
Json to_json(const CertificationReport& r, bool include_timing = true);
Json to_json(const JacobianReport& r);
Json to_json(const DimensionLedger& d);
Json to_json(const RecoveryResult& r);

}  // namespace qtomo
