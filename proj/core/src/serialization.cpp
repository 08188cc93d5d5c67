#include "snrloss/serialization.hpp"

#include <string>

namespace snrloss {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::kConfigError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, key) : fallback;
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::kConfigError, "complex entry must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json vector_to_json(const ComplexVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
  return a;
}

ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kConfigError, "vector must be an array");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kConfigError, "matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::kConfigError, "matrix rows must have equal length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

void to_json(Json& j, const Interferer& x) { j = {{"angle_deg", x.angle_deg}, {"power_db", x.power_db}}; }

void from_json(const Json& j, Interferer& x) {
  x.angle_deg = field<double>(j, "angle_deg");
  x.power_db = field<double>(j, "power_db");
}

void to_json(Json& j, const Scenario& s) {
  Json extras = {{"lambda", s.extras.lambda},
                 {"q", vector_to_json(s.extras.q)},
                 {"q_metric", s.extras.q_metric},
                 {"omega_eigs", s.extras.omega_eigs},
                 {"eta", s.extras.eta},
                 {"dof", s.extras.dof},
                 {"nu", s.extras.nu},
                 {"mu", s.extras.mu}};
  j = {{"kind", std::string(to_string(s.kind))},
       {"sigma", matrix_to_json(s.sigma.matrix())},
       {"ct", matrix_to_json(s.ct.matrix())},
       {"v", vector_to_json(s.v)},
       {"soi_power", s.soi_power},
       {"gamma", s.gamma},
       {"extras", std::move(extras)}};
}

void from_json(const Json& j, Scenario& s) {
  try {
    s.kind = scenario_kind_from_string(field<std::string>(j, "kind"));
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, std::string("scenario.kind: ") + e.what());
  }
  s.sigma = HermitianMatrix(matrix_from_json(field<Json>(j, "sigma")), true);
  s.ct = HermitianMatrix(matrix_from_json(field<Json>(j, "ct")), true);
  s.v = vector_from_json(field<Json>(j, "v"));
  s.soi_power = field_or(j, "soi_power", 0.0);
  s.gamma = field_or(j, "gamma", 1.0);
  s.extras = ScenarioExtras{};
  if (j.contains("extras")) {
    const Json& e = j.at("extras");
    s.extras.lambda = field_or(e, "lambda", 1.0);
    if (e.contains("q")) s.extras.q = vector_from_json(e.at("q"));
    s.extras.q_metric = field_or(e, "q_metric", 0.0);
    s.extras.omega_eigs = field_or(e, "omega_eigs", std::vector<double>{});
    s.extras.eta = field_or(e, "eta", 1.0);
    s.extras.dof = field_or(e, "dof", 0.0);
    s.extras.nu = field_or(e, "nu", 0.0);
    s.extras.mu = field_or(e, "mu", 0.0);
  }
  if (s.sigma.dim() != s.v.size() || s.ct.dim() != s.v.size()) {
    throw Error(ErrorCode::kConfigError, "scenario: sigma, ct and v dimensions differ");
  }
}

void to_json(Json& j, const LossLaw& law) {
  j = {{"kind", std::string(to_string(law.kind))},
       {"N", law.n},
       {"K", law.k},
       {"R", law.r},
       {"snr_opt_over_gamma", law.snr_opt_over_gamma},
       {"lambda", law.lambda},
       {"omega_eigs", law.omega_eigs},
       {"deltas", law.deltas},
       {"nu", law.nu},
       {"a", law.a},
       {"a_prime", law.a_prime},
       {"q_metric", law.q_metric},
       {"approximate", law.approximate()}};
}

void from_json(const Json& j, LossLaw& law) {
  law = LossLaw{};
  law.kind = law_kind_from_string(field<std::string>(j, "kind"));
  law.n = field_or(j, "N", 0);
  law.k = field_or(j, "K", 0);
  law.r = field_or(j, "R", 0);
  law.snr_opt_over_gamma = field_or(j, "snr_opt_over_gamma", 0.0);
  law.lambda = field_or(j, "lambda", 1.0);
  law.omega_eigs = field_or(j, "omega_eigs", std::vector<double>{});
  law.deltas = field_or(j, "deltas", std::vector<double>{});
  law.nu = field_or(j, "nu", 0.0);
  law.a = field_or(j, "a", 1.0);
  law.a_prime = field_or(j, "a_prime", 1.0);
  law.q_metric = field_or(j, "q_metric", 0.0);
  law.validate();
}

void to_json(Json& j, const FilterSpec& f) {
  j = {{"kind", std::string(to_string(f.kind))}, {"R", f.r}, {"mu", f.mu}, {"L", f.l}};
  if (f.psi.size() != 0) j["psi"] = matrix_to_json(f.psi);
}

void from_json(const Json& j, FilterSpec& f) {
  f = FilterSpec{};
  f.kind = filter_kind_from_string(field_or(j, "kind", std::string("smi")));
  f.r = field_or(j, "R", 0);
  f.mu = field_or(j, "mu", 0.0);
  f.l = field_or(j, "L", 1);
  if (j.contains("psi")) f.psi = matrix_from_json(j.at("psi"));
}

void to_json(Json& j, const ExperimentConfig& c) {
  j = {{"scenario", c.scenario},
       {"filter", c.filter},
       {"trials", c.trials},
       {"K", c.k},
       {"seed", c.seed},
       {"bins", c.bins},
       {"moments", c.moments},
       {"ks_targets", c.ks_targets}};
}

void from_json(const Json& j, ExperimentConfig& c) {
  c = ExperimentConfig{};
  c.scenario = field<Scenario>(j, "scenario");
  if (j.contains("filter")) c.filter = j.at("filter").get<FilterSpec>();
  c.trials = field<int>(j, "trials");
  c.k = field<int>(j, "K");
  c.seed = field_or<std::uint64_t>(j, "seed", 0);
  c.bins = field_or(j, "bins", 100);
  c.moments = field_or(j, "moments", true);
  if (j.contains("ks_targets")) {
    for (const Json& t : j.at("ks_targets")) c.ks_targets.push_back(t.get<LossLaw>());
  }
}

void to_json(Json& j, const KsResult& k) {
  j = {{"statistic", k.statistic}, {"threshold_1pct", k.threshold_1pct}, {"pass", k.pass()}};
}

void to_json(Json& j, const Histogram& h) {
  Json edges = Json::array();
  for (std::size_t i = 0; i < h.counts.size(); ++i) edges.push_back(h.left(i));
  if (!h.counts.empty()) edges.push_back(h.hi);
  j = {{"edges", std::move(edges)}, {"counts", h.counts}};
}

void to_json(Json& j, const Moments& m) {
  j = {{"count", m.count}, {"mean", m.mean}, {"variance", m.variance}, {"std_error", m.std_error()}};
}

void to_json(Json& j, const ExperimentResult& r) {
  Json ks = Json::array();
  for (const auto& t : r.ks_results) {
    Json entry = t.ks;
    entry["law"] = t.law;
    entry["empirical_cdf"] = t.empirical_cdf;
    ks.push_back(std::move(entry));
  }
  j = {{"version", r.version},
       {"trials", r.trials},
       {"moments", r.moments},
       {"histogram", r.histogram},
       {"ks_results", std::move(ks)},
       {"samples", r.samples},
       {"runtime_ms", r.runtime_ms},
       {"config", r.config}};
}

}  // namespace snrloss
