#include "vrmec/serialize.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <string>

namespace vrmec {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  if (!j.is_number()) throw ConfigError("expected a number, got " + j.dump());
  return j.get<double>();
}

template <typename T>
T get_as(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("field '" + key + "': " + e.what());
  }
}

const Json& require(const Json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing field '" + key + "'");
  return j.at(key);
}

std::vector<double> doubles(const Json& j, const std::string& key) { return get_as<std::vector<double>>(require(j, key), key); }

std::vector<std::uint8_t> bits(const Json& j, const std::string& key, std::size_t size) {
  auto v = get_as<std::vector<int>>(require(j, key), key);
  if (v.size() != size) throw ConfigError("field '" + key + "' has the wrong length");
  std::vector<std::uint8_t> out(size);
  for (std::size_t k = 0; k < size; ++k) {
    if (v[k] != 0 && v[k] != 1) throw ConfigError("field '" + key + "' must be binary");
    out[k] = static_cast<std::uint8_t>(v[k]);
  }
  return out;
}

Json bits_json(const std::vector<std::uint8_t>& v) {
  Json a = Json::array();
  for (auto b : v) a.push_back(static_cast<int>(b));
  return a;
}

using Field = std::function<void(GenerationConfig&, const Json&)>;

template <typename T>
Field field(T GenerationConfig::*member, const std::string& key) {
  return [member, key](GenerationConfig& c, const Json& v) { c.*member = get_as<T>(v, key); };
}

const std::map<std::string, Field>& config_fields() {
  static const std::map<std::string, Field> fields = {
      {"sbs_count", field(&GenerationConfig::sbs_count, "sbs_count")},
      {"hmd_count", field(&GenerationConfig::hmd_count, "hmd_count")},
      {"viewpoint_count", field(&GenerationConfig::viewpoint_count, "viewpoint_count")},
      {"area_side_m", field(&GenerationConfig::area_side_m, "area_side_m")},
      {"size_min_bits", field(&GenerationConfig::size_min_bits, "size_min_bits")},
      {"size_max_bits", field(&GenerationConfig::size_max_bits, "size_max_bits")},
      {"zipf_lambda", field(&GenerationConfig::zipf_lambda, "zipf_lambda")},
      {"sv_ratio", field(&GenerationConfig::sv_ratio, "sv_ratio")},
      {"cycles_per_bit", field(&GenerationConfig::cycles_per_bit, "cycles_per_bit")},
      {"total_bandwidth_hz", field(&GenerationConfig::total_bandwidth_hz, "total_bandwidth_hz")},
      {"noise_power_w", field(&GenerationConfig::noise_power_w, "noise_power_w")},
      {"orthogonality", field(&GenerationConfig::orthogonality, "orthogonality")},
      {"total_power_dbm", field(&GenerationConfig::total_power_dbm, "total_power_dbm")},
      {"mes_cpu_hz", field(&GenerationConfig::mes_cpu_hz, "mes_cpu_hz")},
      {"hmd_cpu_hz", field(&GenerationConfig::hmd_cpu_hz, "hmd_cpu_hz")},
      {"mes_energy_coeff", field(&GenerationConfig::mes_energy_coeff, "mes_energy_coeff")},
      {"hmd_energy_coeff", field(&GenerationConfig::hmd_energy_coeff, "hmd_energy_coeff")},
      {"mes_cache_bits", field(&GenerationConfig::mes_cache_bits, "mes_cache_bits")},
      {"hmd_cache_bits", field(&GenerationConfig::hmd_cache_bits, "hmd_cache_bits")},
      {"mes_energy_budget_j", field(&GenerationConfig::mes_energy_budget_j, "mes_energy_budget_j")},
      {"hmd_energy_budget_j", field(&GenerationConfig::hmd_energy_budget_j, "hmd_energy_budget_j")},
      {"backhaul_delay_s", field(&GenerationConfig::backhaul_delay_s, "backhaul_delay_s")},
      {"bandwidth_per_hmd_hz",
       [](GenerationConfig& c, const Json& v) {
         if (v.is_null())
           c.bandwidth_per_hmd_hz.reset();
         else
           c.bandwidth_per_hmd_hz = get_as<double>(v, "bandwidth_per_hmd_hz");
       }},
      {"path_loss",
       [](GenerationConfig& c, const Json& v) {
         if (!v.is_object()) throw ConfigError("field 'path_loss' must be an object");
         for (const auto& [k, x] : v.items()) {
           if (k == "ref_gain")
             c.path_loss.ref_gain = get_as<double>(x, k);
           else if (k == "ref_distance_m")
             c.path_loss.ref_distance_m = get_as<double>(x, k);
           else if (k == "exponent")
             c.path_loss.exponent = get_as<double>(x, k);
           else
             throw ConfigError("unknown field 'path_loss." + k + "'");
         }
       }},
  };
  return fields;
}

}  // namespace

GenerationConfig generation_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("generation config must be a JSON object");
  GenerationConfig c = GenerationConfig::desk_preset();
  if (j.contains("preset")) {
    const auto preset = get_as<std::string>(j.at("preset"), "preset");
    if (preset == "large")
      c = GenerationConfig::large_preset();
    else if (preset != "desk")
      throw ConfigError("unknown preset '" + preset + "' (expected desk or large)");
  }
  const auto& fields = config_fields();
  for (const auto& [key, value] : j.items()) {
    if (key == "preset") continue;
    auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("unknown generation field '" + key + "'");
    it->second(c, value);
  }
  return c;
}

Json to_json(const GenerationConfig& c) {
  return Json{
      {"sbs_count", c.sbs_count},
      {"hmd_count", c.hmd_count},
      {"viewpoint_count", c.viewpoint_count},
      {"area_side_m", c.area_side_m},
      {"size_min_bits", c.size_min_bits},
      {"size_max_bits", c.size_max_bits},
      {"zipf_lambda", c.zipf_lambda},
      {"sv_ratio", c.sv_ratio},
      {"cycles_per_bit", c.cycles_per_bit},
      {"total_bandwidth_hz", c.total_bandwidth_hz},
      {"bandwidth_per_hmd_hz", c.bandwidth_per_hmd_hz ? Json(*c.bandwidth_per_hmd_hz) : Json(nullptr)},
      {"noise_power_w", c.noise_power_w},
      {"orthogonality", c.orthogonality},
      {"total_power_dbm", c.total_power_dbm},
      {"mes_cpu_hz", c.mes_cpu_hz},
      {"hmd_cpu_hz", c.hmd_cpu_hz},
      {"mes_energy_coeff", c.mes_energy_coeff},
      {"hmd_energy_coeff", c.hmd_energy_coeff},
      {"mes_cache_bits", c.mes_cache_bits},
      {"hmd_cache_bits", c.hmd_cache_bits},
      {"mes_energy_budget_j", c.mes_energy_budget_j},
      {"hmd_energy_budget_j", c.hmd_energy_budget_j},
      {"backhaul_delay_s", c.backhaul_delay_s},
      {"path_loss",
       {{"ref_gain", c.path_loss.ref_gain},
        {"ref_distance_m", c.path_loss.ref_distance_m},
        {"exponent", c.path_loss.exponent}}},
  };
}

Json to_json(const Scenario& s) {
  Json viewpoints = Json::array();
  for (const auto& v : s.viewpoints)
    viewpoints.push_back({{"id", v.id},
                          {"mv_size_bits", v.mv_size_bits},
                          {"cycles_per_bit", v.cycles_per_bit},
                          {"popularity", v.popularity}});
  auto positions = [](const std::vector<Position>& ps) {
    Json a = Json::array();
    for (const auto& p : ps) a.push_back({p.x, p.y});
    return a;
  };
  return Json{
      {"sbs_count", s.sbs_count},
      {"hmd_count", s.hmd_count},
      {"viewpoints", viewpoints},
      {"sv_ratio", s.sv_ratio},
      {"channel_gain", s.channel_gain},
      {"bandwidth_per_hmd_hz", s.bandwidth_per_hmd_hz},
      {"noise_power_w", s.noise_power_w},
      {"orthogonality", s.orthogonality},
      {"total_power_w", s.total_power_w},
      {"mes_cpu_hz", s.mes_cpu_hz},
      {"hmd_cpu_hz", s.hmd_cpu_hz},
      {"mes_energy_coeff", s.mes_energy_coeff},
      {"hmd_energy_coeff", s.hmd_energy_coeff},
      {"mes_cache_bits", s.mes_cache_bits},
      {"hmd_cache_bits", s.hmd_cache_bits},
      {"mes_energy_budget_j", s.mes_energy_budget_j},
      {"hmd_energy_budget_j", s.hmd_energy_budget_j},
      {"backhaul_delay_s", s.backhaul_delay_s},
      {"sbs_positions", positions(s.sbs_positions)},
      {"hmd_positions", positions(s.hmd_positions)},
      {"seed", s.seed},
      {"generation", to_json(s.generation)},
  };
}

Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  Scenario s;
  auto num = [&](const std::string& key) { return get_as<double>(require(j, key), key); };
  s.sbs_count = get_as<std::size_t>(require(j, "sbs_count"), "sbs_count");
  s.hmd_count = get_as<std::size_t>(require(j, "hmd_count"), "hmd_count");
  for (const auto& v : require(j, "viewpoints")) {
    Viewpoint vp;
    vp.id = get_as<std::size_t>(require(v, "id"), "id");
    vp.mv_size_bits = get_as<double>(require(v, "mv_size_bits"), "mv_size_bits");
    vp.cycles_per_bit = get_as<double>(require(v, "cycles_per_bit"), "cycles_per_bit");
    vp.popularity = get_as<double>(require(v, "popularity"), "popularity");
    s.viewpoints.push_back(vp);
  }
  s.sv_ratio = num("sv_ratio");
  s.channel_gain = doubles(j, "channel_gain");
  s.bandwidth_per_hmd_hz = num("bandwidth_per_hmd_hz");
  s.noise_power_w = num("noise_power_w");
  s.orthogonality = num("orthogonality");
  s.total_power_w = num("total_power_w");
  s.mes_cpu_hz = num("mes_cpu_hz");
  s.hmd_cpu_hz = num("hmd_cpu_hz");
  s.mes_energy_coeff = num("mes_energy_coeff");
  s.hmd_energy_coeff = num("hmd_energy_coeff");
  s.mes_cache_bits = doubles(j, "mes_cache_bits");
  s.hmd_cache_bits = doubles(j, "hmd_cache_bits");
  s.mes_energy_budget_j = doubles(j, "mes_energy_budget_j");
  s.hmd_energy_budget_j = doubles(j, "hmd_energy_budget_j");
  s.backhaul_delay_s = num("backhaul_delay_s");
  auto positions = [&](const std::string& key) {
    std::vector<Position> out;
    for (const auto& p : require(j, key)) {
      auto xy = get_as<std::vector<double>>(p, key);
      if (xy.size() != 2) throw ConfigError("field '" + key + "' entries must be [x, y]");
      out.push_back({xy[0], xy[1]});
    }
    return out;
  };
  s.sbs_positions = positions("sbs_positions");
  s.hmd_positions = positions("hmd_positions");
  if (j.contains("seed")) s.seed = get_as<std::uint64_t>(j.at("seed"), "seed");
  if (j.contains("generation")) s.generation = generation_config_from_json(j.at("generation"));
  if (const auto v = validate_scenario(s); !v.empty())
    throw ConfigError("invalid scenario: " + v.front().field + ": " + v.front().message);
  return s;
}

Json to_json(const Decision& d) {
  Json power = Json::array();
  for (double p : d.power.p) power.push_back(number(p));
  return Json{
      {"viewpoint_count", d.viewpoint_count},
      {"sbs_count", d.sbs_count},
      {"hmd_count", d.hmd_count},
      {"cache_mes_mv", bits_json(d.cache_mes_mv)},
      {"cache_mes_sv", bits_json(d.cache_mes_sv)},
      {"cache_hmd_mv", bits_json(d.cache_hmd_mv)},
      {"cache_hmd_sv", bits_json(d.cache_hmd_sv)},
      {"offload_mes", bits_json(d.offload_mes)},
      {"offload_cloud", bits_json(d.offload_cloud)},
      {"power_w", power},
  };
}

Decision decision_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("decision must be a JSON object");
  const auto n = get_as<std::size_t>(require(j, "viewpoint_count"), "viewpoint_count");
  const auto m = get_as<std::size_t>(require(j, "sbs_count"), "sbs_count");
  const auto u = get_as<std::size_t>(require(j, "hmd_count"), "hmd_count");
  Decision d(n, m, u);
  d.cache_mes_mv = bits(j, "cache_mes_mv", n * m);
  d.cache_mes_sv = bits(j, "cache_mes_sv", n * m);
  d.cache_hmd_mv = bits(j, "cache_hmd_mv", n * u);
  d.cache_hmd_sv = bits(j, "cache_hmd_sv", n * u);
  d.offload_mes = bits(j, "offload_mes", n * m * u);
  d.offload_cloud = bits(j, "offload_cloud", n * m * u);
  const auto& power = require(j, "power_w");
  if (!power.is_array() || power.size() != m * u) throw ConfigError("field 'power_w' has the wrong length");
  for (std::size_t k = 0; k < m * u; ++k) d.power.p[k] = number_from(power[k]);
  return d;
}

Json to_json(const FeasibilityReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"constraint", constraint_name(c.id)},
                      {"holds", c.holds},
                      {"violations", c.violation_count},
                      {"worst_violation", number(c.worst_violation)},
                      {"offending", c.offending}});
  return Json{{"feasible", r.feasible()}, {"checks", checks}};
}

Json to_json(const SolveResult& r, bool include_decision) {
  Json trace = Json::array();
  for (const auto& t : r.bound_trace)
    trace.push_back({{"iteration", t.iteration},
                     {"f_min", number(t.f_min)},
                     {"f_max", number(t.f_max)},
                     {"incumbent", number(t.incumbent)},
                     {"boxes_open", t.boxes_open}});
  Json j{
      {"algorithm", r.algorithm},
      {"feasible", r.feasible},
      {"best_value_s", number(r.best_value)},
      {"global_lower_bound_s", number(r.global_lower_bound)},
      {"iterations", r.iterations},
      {"boxes_explored", r.boxes_explored},
      {"wall_time_s", r.wall_time_s},
      {"bound_trace", trace},
      {"trace_hit_ratio", r.trace_hit_ratio ? Json(*r.trace_hit_ratio) : Json(nullptr)},
      {"note", r.note},
  };
  if (include_decision) j["best_decision"] = to_json(r.best_decision);
  return j;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
  out << "iteration,f_min,f_max,incumbent,boxes_open\n";
  out << std::setprecision(17);
  for (const auto& t : trace)
    out << t.iteration << ',' << t.f_min << ',' << t.f_max << ',' << t.incumbent << ',' << t.boxes_open << '\n';
}

}  // namespace vrmec
