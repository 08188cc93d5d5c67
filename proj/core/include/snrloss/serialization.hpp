#pragma once

#include <nlohmann/json.hpp>

#include "snrloss/experiment.hpp"
#include "snrloss/hermitian.hpp"
#include "snrloss/loss_law.hpp"
#include "snrloss/scenario.hpp"

namespace snrloss {

using Json = nlohmann::json;

/// Complex numbers are [re, im]; matrices are arrays of rows.
Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);
Json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const Json& j);
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

void to_json(Json& j, const Interferer& x);
void from_json(const Json& j, Interferer& x);
void to_json(Json& j, const Scenario& s);
void from_json(const Json& j, Scenario& s);
void to_json(Json& j, const LossLaw& law);
void from_json(const Json& j, LossLaw& law);
void to_json(Json& j, const FilterSpec& f);
void from_json(const Json& j, FilterSpec& f);
void to_json(Json& j, const ExperimentConfig& c);
void from_json(const Json& j, ExperimentConfig& c);
void to_json(Json& j, const KsResult& k);
void to_json(Json& j, const Histogram& h);
void to_json(Json& j, const Moments& m);
/// `runtime_ms` is the only field that varies between identical runs.
void to_json(Json& j, const ExperimentResult& r);

}  // namespace snrloss
