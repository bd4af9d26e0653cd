#include "ltmpc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <system_error>

namespace ltmpc {

namespace {

// Field reader that records every key it touches so leftovers can be
// reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(where(), "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, std::optional<double> fallback,
                const std::function<bool(double)>& valid, const char* rule) {
    used_.insert(key);
    if (!j_.contains(key)) {
      if (!fallback) throw SchemaError(where(key), "required field missing");
      return *fallback;
    }
    const Json& v = j_.at(key);
    if (!v.is_number()) throw SchemaError(where(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || !valid(x)) throw SchemaError(where(key), std::string("must be ") + rule);
    return x;
  }

  std::optional<double> optional_number(const std::string& key, const std::function<bool(double)>& valid,
                                        const char* rule) {
    if (!j_.contains(key)) {
      used_.insert(key);
      return std::nullopt;
    }
    return number(key, std::nullopt, valid, rule);
  }

  long integer(const std::string& key, long fallback, long lo, long hi) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) throw SchemaError(where(key), "expected an integer");
    const long x = v.get<long>();
    if (x < lo || x > hi)
      throw SchemaError(where(key), "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  std::string string(const std::string& key, std::optional<std::string> fallback) {
    used_.insert(key);
    if (!j_.contains(key)) {
      if (!fallback) throw SchemaError(where(key), "required field missing");
      return *fallback;
    }
    const Json& v = j_.at(key);
    if (!v.is_string()) throw SchemaError(where(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool fallback) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) throw SchemaError(where(key), "expected true or false");
    return v.get<bool>();
  }

  const Json& child(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::string where(const std::string& key = "") const { return key.empty() ? path_ : path_ + "/" + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw SchemaError(where(key), "unknown key");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

const auto positive = [](double x) { return x > 0.0; };
const auto non_negative = [](double x) { return x >= 0.0; };
const auto any = [](double) { return true; };
const auto fraction = [](double x) { return x > 0.0 && x <= 1.0; };
const auto probability = [](double x) { return x >= 0.0 && x <= 1.0; };
const auto inclination = [](double x) { return x >= 0.0 && x <= 180.0; };
const auto above_surface = [](double x) { return x > Gravity{}.radius; };

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(line_column(text, e.byte == 0 ? 0 : e.byte - 1), "invalid JSON");
  }

  ScenarioFile file;
  Scenario& s = file.scenario;
  ObjectReader top(root, "");
  s.name = top.string("name", std::nullopt);
  s.epoch = top.string("epoch", std::nullopt);
  try {
    julian_date_from_iso(s.epoch);
  } catch (const std::invalid_argument&) {
    throw SchemaError("/epoch", "expected an ISO-8601 UTC time such as 2022-03-25T00:00:00Z");
  }

  {
    ObjectReader r(top.child("spacecraft"), "/spacecraft");
    s.sc.m0 = r.number("m0_kg", std::nullopt, positive, "> 0");
    s.sc.t_max = r.number("thrust_N", std::nullopt, positive, "> 0");
    s.sc.isp = r.number("isp_s", std::nullopt, positive, "> 0");
    s.sc.duty_cycle = r.number("duty_cycle", std::nullopt, fraction, "in (0, 1]");
    s.sc.cd = r.number("cd", 2.2, positive, "> 0");
    s.sc.area = r.number("area_m2", 0.01, positive, "> 0");
    r.finish();
  }
  {
    ObjectReader r(top.child("initial"), "/initial");
    s.initial.a = r.number("a_km", std::nullopt, above_surface, "above the Earth's surface");
    s.initial.e = r.number("e", std::nullopt, [](double x) { return x >= 0.0 && x < 1.0; }, "in [0, 1)");
    s.initial.i = r.number("i_deg", std::nullopt, inclination, "in [0, 180]") * kDeg;
    s.initial.raan = wrap_two_pi(r.number("raan_deg", std::nullopt, any, "finite") * kDeg);
    s.initial.argp = wrap_two_pi(r.number("argp_deg", 0.0, any, "finite") * kDeg);
    s.initial.ta = wrap_two_pi(r.number("ta_deg", 0.0, any, "finite") * kDeg);
    r.finish();
  }
  {
    ObjectReader r(top.child("target"), "/target");
    s.target.a_f = r.number("a_km", std::nullopt, above_surface, "above the Earth's surface");
    if (auto i = r.optional_number("i_deg", inclination, "in [0, 180]")) s.target.i_f = *i * kDeg;
    if (auto o = r.optional_number("raan_deg", any, "finite")) s.target.raan_f = wrap_two_pi(*o * kDeg);
    r.finish();
  }
  GuidanceConfig& g = s.guidance;
  if (top.has("guidance")) {
    ObjectReader r(top.child("guidance"), "/guidance");
    g.epsilon = r.number("epsilon_ms", 2.0, positive, "> 0");
    g.dc_ref = r.number("dc_ref", 0.4, fraction, "in (0, 1]");
    g.segment.nodes_per_orbit = static_cast<int>(r.integer("nodes_per_orbit", 36, 8, 720));
    g.segment.n_orbits = static_cast<int>(r.integer("orbits_per_segment", 5, 1, 100));
    g.dv_prime_weight = r.number("dv_prime_weight", 2.0, positive, "> 0");
    g.forced_misthrust_segments = static_cast<int>(r.integer("forced_misthrust_segments", 0, 0, 100000));
    g.max_recomputations = static_cast<int>(r.integer("max_recomputations", 40, 0, 100000));
    r.finish();
  }
  if (g.dc_ref > s.sc.duty_cycle) throw SchemaError("/guidance/dc_ref", "must not exceed spacecraft duty_cycle");
  if (top.has("errors")) {
    ObjectReader r(top.child("errors"), "/errors");
    g.errors.p_misthrust = r.number("p_misthrust", 0.0, probability, "in [0, 1]");
    g.errors.sigma_t = r.number("sigma_t", 0.0, non_negative, ">= 0");
    g.errors.sigma_beta = r.number("sigma_beta_deg", 0.0, non_negative, ">= 0") * kDeg;
    g.errors.seed = static_cast<std::uint64_t>(r.integer("seed", 0, 0, std::numeric_limits<long>::max()));
    r.finish();
  }
  if (top.has("output")) {
    ObjectReader r(top.child("output"), "/output");
    file.output.dir = r.string("dir", file.output.dir);
    file.output.log = r.string("log", file.output.log);
    file.output.csv = r.string("csv", file.output.csv);
    file.output.plots = r.boolean("plots", file.output.plots);
    r.finish();
  }
  top.finish();
  return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path) { return parse_scenario(read_text(path)); }

Json scenario_to_json(const ScenarioFile& file) {
  const Scenario& s = file.scenario;
  const GuidanceConfig& g = s.guidance;
  Json j;
  j["name"] = s.name;
  j["epoch"] = s.epoch;
  j["spacecraft"] = {{"m0_kg", s.sc.m0},  {"thrust_N", s.sc.t_max}, {"isp_s", s.sc.isp},
                     {"duty_cycle", s.sc.duty_cycle}, {"cd", s.sc.cd}, {"area_m2", s.sc.area}};
  j["initial"] = {{"a_km", s.initial.a},           {"e", s.initial.e},
                  {"i_deg", s.initial.i / kDeg},   {"raan_deg", s.initial.raan / kDeg},
                  {"argp_deg", s.initial.argp / kDeg}, {"ta_deg", s.initial.ta / kDeg}};
  Json t = {{"a_km", s.target.a_f}};
  if (s.target.i_f) t["i_deg"] = *s.target.i_f / kDeg;
  if (s.target.raan_f) t["raan_deg"] = *s.target.raan_f / kDeg;
  j["target"] = t;
  j["guidance"] = {{"epsilon_ms", g.epsilon},
                   {"dc_ref", g.dc_ref},
                   {"nodes_per_orbit", g.segment.nodes_per_orbit},
                   {"orbits_per_segment", g.segment.n_orbits},
                   {"dv_prime_weight", g.dv_prime_weight},
                   {"forced_misthrust_segments", g.forced_misthrust_segments},
                   {"max_recomputations", g.max_recomputations}};
  j["errors"] = {{"p_misthrust", g.errors.p_misthrust},
                 {"sigma_t", g.errors.sigma_t},
                 {"sigma_beta_deg", g.errors.sigma_beta / kDeg},
                 {"seed", g.errors.seed}};
  j["output"] = {{"dir", file.output.dir}, {"log", file.output.log}, {"csv", file.output.csv},
                 {"plots", file.output.plots}};
  return j;
}

Json scenario_schema() {
  auto num = [](const char* desc) { return Json{{"type", "number"}, {"description", desc}}; };
  auto obj = [](Json props, Json required) {
    return Json{{"type", "object"}, {"additionalProperties", false}, {"properties", props}, {"required", required}};
  };
  Json schema = obj(
      {{"name", {{"type", "string"}}},
       {"epoch", {{"type", "string"}, {"description", "ISO-8601 UTC, e.g. 2022-03-25T00:00:00Z"}}},
       {"spacecraft", obj({{"m0_kg", num("wet mass, kg, > 0")},
                           {"thrust_N", num("maximum thrust, N, > 0")},
                           {"isp_s", num("specific impulse, s, > 0")},
                           {"duty_cycle", num("engine duty cycle DC, (0, 1]")},
                           {"cd", num("drag coefficient, default 2.2")},
                           {"area_m2", num("drag area, m^2, default 0.01")}},
                          {"m0_kg", "thrust_N", "isp_s", "duty_cycle"})},
       {"initial", obj({{"a_km", num("osculating semi-major axis, km")},
                        {"e", num("eccentricity, [0, 1)")},
                        {"i_deg", num("inclination, deg, [0, 180]")},
                        {"raan_deg", num("right ascension of ascending node, deg")},
                        {"argp_deg", num("argument of perigee, deg, default 0")},
                        {"ta_deg", num("true anomaly, deg, default 0")}},
                       {"a_km", "e", "i_deg", "raan_deg"})},
       {"target", obj({{"a_km", num("mean semi-major axis, km")},
                       {"i_deg", num("mean inclination, deg; omit to leave untracked")},
                       {"raan_deg", num("mean node at epoch, deg; omit to leave untracked")}},
                      {"a_km"})},
       {"guidance", obj({{"epsilon_ms", num("recomputation threshold on dv', m/s, default 2")},
                         {"dc_ref", num("planning duty cycle DC', (0, DC], default 0.4")},
                         {"nodes_per_orbit", {{"type", "integer"}, {"minimum", 8}}},
                         {"orbits_per_segment", {{"type", "integer"}, {"minimum", 1}}},
                         {"dv_prime_weight", num("weight of dv' in the tracking objective, default 2")},
                         {"forced_misthrust_segments", {{"type", "integer"}, {"minimum", 0}}},
                         {"max_recomputations", {{"type", "integer"}, {"minimum", 0}}}},
                        Json::array())},
       {"errors", obj({{"p_misthrust", num("per-segment misthrust probability, [0, 1]")},
                       {"sigma_t", num("fractional thrust magnitude std dev")},
                       {"sigma_beta_deg", num("out-of-plane angle std dev, deg")},
                       {"seed", {{"type", "integer"}, {"minimum", 0}}}},
                      Json::array())},
       {"output", obj({{"dir", {{"type", "string"}}},
                       {"log", {{"type", "string"}}},
                       {"csv", {{"type", "string"}}},
                       {"plots", {{"type", "boolean"}}}},
                      Json::array())}},
      {"name", "epoch", "spacecraft", "initial", "target"});
  schema["$schema"] = "https://json-schema.org/draft/2020-12/schema";
  schema["title"] = "ltmpc scenario";
  return schema;
}

// ---------------------------------------------------------------------------
// Guidance log

namespace {

const char* const kNodeColumns[] = {"t_s",     "x_km",    "y_km",    "z_km",    "vx_kms",
                                    "vy_kms",  "vz_kms",  "m_kg",    "aR_kms2", "aT_kms2",
                                    "aN_kms2", "eta",     "dv_cum_ms"};

std::array<double, 13> node_row(const NodeRecord& n) {
  return {n.t,        n.x.r.x(),  n.x.r.y(),  n.x.r.z(),  n.x.v.x(), n.x.v.y(), n.x.v.z(),
          n.m,        n.a_rtn.x(), n.a_rtn.y(), n.a_rtn.z(), static_cast<double>(n.eta), n.dv_cum};
}

NodeRecord node_from_row(const std::array<double, 13>& v) {
  NodeRecord n;
  n.t = v[0];
  n.x.r = Vector3(v[1], v[2], v[3]);
  n.x.v = Vector3(v[4], v[5], v[6]);
  n.x.epoch = v[0];
  n.m = v[7];
  n.a_rtn = Vector3(v[8], v[9], v[10]);
  n.eta = static_cast<int>(v[11]);
  n.dv_cum = v[12];
  return n;
}

}  // namespace

Json log_to_json(const GuidanceLog& log) {
  Json j;
  j["scenario"] = log.scenario;
  j["seed"] = log.seed;
  const TerminalSummary& s = log.summary;
  j["summary"] = {{"da_km", s.da},   {"di_deg", s.di},   {"draan_deg", s.draan}, {"tof_d", s.tof},
                  {"dv_ms", s.dv},   {"dv_prime_ms", s.dv_prime}, {"m_final_kg", s.m_final}};
  j["reference"] = {{"dv_ms", log.reference_dv}, {"tof_d", log.reference_tof}};
  j["recomputations"] = log.recomputations;
  j["recompute_times_s"] = log.recompute_times;
  j["aborted"] = log.aborted;
  j["message"] = log.message;
  Json segs = Json::array();
  for (const SegmentRecord& r : log.segments) {
    segs.push_back({{"index", r.index},
                    {"t0_s", r.t0},
                    {"tf_s", r.tf},
                    {"arcs", r.arcs},
                    {"status", r.status},
                    {"iterations", r.iterations},
                    {"dv_prime_planned_ms", r.dv_prime_planned},
                    {"dv_prime_ms", r.dv_prime},
                    {"dv_ms", r.dv},
                    {"objective", r.objective},
                    {"guess_objective", r.guess_objective},
                    {"guess_dv_prime_ms", r.guess_dv_prime},
                    {"misthrust", r.misthrust},
                    {"recompute", r.recompute},
                    {"gate_drops", r.gate_drops},
                    {"bound_violations", r.bound_violations}});
  }
  j["segments"] = segs;
  Json cols = Json::array();
  for (const char* c : kNodeColumns) cols.push_back(c);
  Json rows = Json::array();
  for (const NodeRecord& n : log.nodes) rows.push_back(node_row(n));
  j["nodes"] = {{"columns", cols}, {"rows", rows}};
  return j;
}

GuidanceLog log_from_json(const Json& j) {
  GuidanceLog log;
  try {
    log.scenario = j.at("scenario").get<std::string>();
    log.seed = j.at("seed").get<std::uint64_t>();
    const Json& s = j.at("summary");
    log.summary = {s.at("da_km").get<double>(),  s.at("di_deg").get<double>(),
                   s.at("draan_deg").get<double>(), s.at("tof_d").get<double>(),
                   s.at("dv_ms").get<double>(),  s.at("dv_prime_ms").get<double>(),
                   s.at("m_final_kg").get<double>()};
    log.reference_dv = j.at("reference").at("dv_ms").get<double>();
    log.reference_tof = j.at("reference").at("tof_d").get<double>();
    log.recomputations = j.at("recomputations").get<int>();
    log.recompute_times = j.at("recompute_times_s").get<std::vector<double>>();
    log.aborted = j.at("aborted").get<bool>();
    log.message = j.at("message").get<std::string>();
    for (const Json& r : j.at("segments")) {
      SegmentRecord rec;
      rec.index = r.at("index").get<int>();
      rec.t0 = r.at("t0_s").get<double>();
      rec.tf = r.at("tf_s").get<double>();
      rec.arcs = r.at("arcs").get<int>();
      rec.status = r.at("status").get<std::string>();
      rec.iterations = r.at("iterations").get<int>();
      rec.dv_prime_planned = r.at("dv_prime_planned_ms").get<double>();
      rec.dv_prime = r.at("dv_prime_ms").get<double>();
      rec.dv = r.at("dv_ms").get<double>();
      rec.objective = r.at("objective").get<double>();
      rec.guess_objective = r.at("guess_objective").get<double>();
      rec.guess_dv_prime = r.at("guess_dv_prime_ms").get<double>();
      rec.misthrust = r.at("misthrust").get<bool>();
      rec.recompute = r.at("recompute").get<bool>();
      rec.gate_drops = r.at("gate_drops").get<int>();
      rec.bound_violations = r.at("bound_violations").get<int>();
      log.segments.push_back(rec);
    }
    for (const Json& row : j.at("nodes").at("rows")) log.nodes.push_back(node_from_row(row.get<std::array<double, 13>>()));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("log", e.what());
  }
  return log;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string nodes_to_csv(const std::vector<NodeRecord>& nodes) {
  std::string out;
  for (std::size_t c = 0; c < std::size(kNodeColumns); ++c) {
    if (c) out += ',';
    out += kNodeColumns[c];
  }
  out += '\n';
  for (const NodeRecord& n : nodes) {
    const auto row = node_row(n);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::vector<NodeRecord> nodes_from_csv(const std::string& text) {
  std::vector<NodeRecord> nodes;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("csv:1", "missing header");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<double, 13> v{};
    std::size_t pos = 0;
    for (std::size_t c = 0; c < v.size(); ++c) {
      const std::size_t end = line.find(',', pos);
      const std::string cell = line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v[c]);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw SchemaError("csv:" + std::to_string(line_no), "bad number in column " + std::to_string(c + 1));
      if (end == std::string::npos && c + 1 < v.size())
        throw SchemaError("csv:" + std::to_string(line_no), "too few columns");
      pos = end + 1;
    }
    nodes.push_back(node_from_row(v));
  }
  return nodes;
}

// ---------------------------------------------------------------------------
// Reference, problem, solution

namespace {

std::vector<double> scaled(const std::vector<double>& v, double k) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * k;
  return out;
}

template <typename M>
Json matrix_json(const M& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

Json reference_to_json(const ReferenceTrajectory& ref) {
  Json j;
  j["version"] = ReferenceTrajectory::kVersion;
  j["dv_total_ms"] = ref.dv_total;
  j["tof_s"] = ref.tof;
  j["dc_ref"] = ref.dc_ref;
  j["period_s"] = ref.period;
  j["nodes_per_orbit"] = ref.nodes_per_orbit;
  j["m0_kg"] = ref.m0;
  j["dv_adjust_ms"] = ref.dv_adjust;
  j["plan"] = {{"a_d_km", ref.plan.a_d},       {"i_d_deg", ref.plan.i_d / kDeg},
               {"wait_s", ref.plan.t_wait},    {"revolutions", ref.plan.revolutions},
               {"dv_ms", ref.plan.dv},         {"tof_s", ref.plan.tof}};
  j["t_s"] = ref.t;
  j["f_t_kms2"] = ref.f_t;
  j["beta_deg"] = scaled(ref.beta, 1.0 / kDeg);
  j["a_km"] = ref.a;
  j["i_deg"] = scaled(ref.inc, 1.0 / kDeg);
  j["raan_deg"] = scaled(ref.raan, 1.0 / kDeg);
  j["dv_cum_ms"] = ref.dv_cum;
  j["switch_times_s"] = ref.switch_times;
  return j;
}

ReferenceTrajectory reference_from_json(const Json& j) {
  ReferenceTrajectory ref;
  try {
    if (j.at("version").get<int>() != ReferenceTrajectory::kVersion)
      throw SchemaError("/version", "unsupported reference version");
    ref.dv_total = j.at("dv_total_ms").get<double>();
    ref.tof = j.at("tof_s").get<double>();
    ref.dc_ref = j.at("dc_ref").get<double>();
    ref.period = j.at("period_s").get<double>();
    ref.nodes_per_orbit = j.at("nodes_per_orbit").get<int>();
    ref.m0 = j.at("m0_kg").get<double>();
    ref.dv_adjust = j.at("dv_adjust_ms").get<double>();
    const Json& p = j.at("plan");
    ref.plan.a_d = p.at("a_d_km").get<double>();
    ref.plan.i_d = p.at("i_d_deg").get<double>() * kDeg;
    ref.plan.t_wait = p.at("wait_s").get<double>();
    ref.plan.revolutions = p.at("revolutions").get<int>();
    ref.plan.dv = p.at("dv_ms").get<double>();
    ref.plan.tof = p.at("tof_s").get<double>();
    ref.t = j.at("t_s").get<std::vector<double>>();
    ref.f_t = j.at("f_t_kms2").get<std::vector<double>>();
    ref.beta = scaled(j.at("beta_deg").get<std::vector<double>>(), kDeg);
    ref.a = j.at("a_km").get<std::vector<double>>();
    ref.inc = scaled(j.at("i_deg").get<std::vector<double>>(), kDeg);
    ref.raan = scaled(j.at("raan_deg").get<std::vector<double>>(), kDeg);
    ref.dv_cum = j.at("dv_cum_ms").get<std::vector<double>>();
    ref.switch_times = j.at("switch_times_s").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("reference", e.what());
  }
  const std::size_t n = ref.t.size();
  if (n == 0 || ref.f_t.size() != n || ref.beta.size() != n || ref.a.size() != n || ref.inc.size() != n ||
      ref.raan.size() != n || ref.dv_cum.size() != n)
    throw SchemaError("reference", "profile lengths differ from the time grid");
  return ref;
}

Json problem_to_json(const SegmentProblem& p) {
  Json j;
  j["t0_s"] = p.t0;
  j["tf_s"] = p.tf;
  j["dt_s"] = p.dt;
  j["bounds_kms2"] = p.bounds;
  j["masses_kg"] = p.masses;
  Json ag = Json::array();
  for (const Vector3& a : p.a_guess) ag.push_back({a.x(), a.y(), a.z()});
  j["a_guess_kms2"] = ag;
  Json xg = Json::array();
  for (const Vector6& x : p.x_guess) xg.push_back(std::vector<double>(x.data(), x.data() + 6));
  j["x_guess"] = xg;
  j["x0"] = std::vector<double>(p.x0.data(), p.x0.data() + 6);
  Json stm = Json::array();
  for (const StmPair& s : p.stm_chain) stm.push_back({{"a", matrix_json(s.a_mat)}, {"b", matrix_json(s.b_mat)}});
  j["stm"] = stm;
  Json t = {{"a_km", p.target.a}};
  if (p.target.i) t["i_deg"] = *p.target.i / kDeg;
  if (p.target.raan) t["raan_deg"] = *p.target.raan / kDeg;
  j["target"] = t;
  j["dv_jacobian"] = matrix_json(p.dv_jacobian);
  j["dv_guess_ms"] = {p.dv_guess.x(), p.dv_guess.y(), p.dv_guess.z()};
  j["dv_prime_weight"] = p.dv_prime_weight;
  j["accel_unit_kms2"] = p.accel_unit;
  return j;
}

namespace {

template <int R, int C>
Eigen::Matrix<double, R, C> matrix_from_json(const Json& j) {
  Eigen::Matrix<double, R, C> m;
  if (j.size() != R) throw SchemaError("problem", "matrix row count");
  for (int r = 0; r < R; ++r) {
    if (j[r].size() != C) throw SchemaError("problem", "matrix column count");
    for (int c = 0; c < C; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

}  // namespace

SegmentProblem problem_from_json(const Json& j) {
  SegmentProblem p;
  try {
    p.t0 = j.at("t0_s").get<double>();
    p.tf = j.at("tf_s").get<double>();
    p.dt = j.at("dt_s").get<std::vector<double>>();
    p.bounds = j.at("bounds_kms2").get<std::vector<double>>();
    p.masses = j.at("masses_kg").get<std::vector<double>>();
    for (const Json& a : j.at("a_guess_kms2")) p.a_guess.push_back(matrix_from_json<1, 3>(Json::array({a})).transpose());
    for (const Json& x : j.at("x_guess")) p.x_guess.push_back(matrix_from_json<1, 6>(Json::array({x})).transpose());
    p.x0 = matrix_from_json<1, 6>(Json::array({j.at("x0")})).transpose();
    for (const Json& s : j.at("stm")) {
      StmPair pair;
      pair.a_mat = matrix_from_json<6, 6>(s.at("a"));
      pair.b_mat = matrix_from_json<6, 3>(s.at("b"));
      p.stm_chain.push_back(pair);
    }
    const Json& t = j.at("target");
    p.target.a = t.at("a_km").get<double>();
    if (t.contains("i_deg")) p.target.i = t["i_deg"].get<double>() * kDeg;
    if (t.contains("raan_deg")) p.target.raan = t["raan_deg"].get<double>() * kDeg;
    p.dv_jacobian = matrix_from_json<3, 6>(j.at("dv_jacobian"));
    p.dv_guess = matrix_from_json<1, 3>(Json::array({j.at("dv_guess_ms")})).transpose();
    p.dv_prime_weight = j.at("dv_prime_weight").get<double>();
    p.accel_unit = j.at("accel_unit_kms2").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("problem", e.what());
  }
  const std::size_t n = p.dt.size();
  if (p.bounds.size() != n || p.a_guess.size() != n || p.stm_chain.size() != n || p.x_guess.size() != n + 1)
    throw SchemaError("problem", "inconsistent arc counts");
  return p;
}

Json solution_to_json(const SegmentSolution& s) {
  Json j;
  Json acc = Json::array();
  for (const Vector3& a : s.accels) acc.push_back({a.x(), a.y(), a.z()});
  j["accels_kms2"] = acc;
  j["dv_segment_ms"] = s.dv_segment;
  j["dv_prime_ms"] = s.dv_prime;
  j["objective"] = s.objective;
  j["x_terminal"] = std::vector<double>(s.x_terminal.data(), s.x_terminal.data() + 6);
  j["status"] = to_string(s.status);
  j["iterations"] = s.iterations;
  return j;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::system_error(ec, "cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + path.string());
  out << text;
  if (!out) throw std::system_error(errno, std::generic_category(), "write failed " + path.string());
}

}  // namespace ltmpc
