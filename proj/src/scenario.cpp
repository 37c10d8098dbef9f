#include "bilayer/scenario.hpp"

#include <fstream>
#include <sstream>

#include "bilayer/errors.hpp"
#include "json.hpp"

namespace bilayer {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) parse_fail(std::string("expected a number for '") + key + "'");
  return j.at(key).get<double>();
}

Vec2 vec2(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    parse_fail("expected a 2-vector for '" + what + "'");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::pair<double, double> range(const json& j, const std::string& what) {
  const Vec2 v = vec2(j, what);
  return {v.x, v.y};
}

}  // namespace

const char* to_string(ConstructionKind k) {
  switch (k) {
    case ConstructionKind::General: return "general";
    case ConstructionKind::VariantI: return "variant_i";
    case ConstructionKind::VariantII: return "variant_ii";
    case ConstructionKind::VariantIII: return "variant_iii";
    case ConstructionKind::MultiJump: return "multi_jump";
    case ConstructionKind::Parallel: return "parallel";
    case ConstructionKind::BRecovery: return "b_recovery";
  }
  return "?";
}

ConstructionKind construction_from_string(const std::string& s) {
  for (ConstructionKind k : {ConstructionKind::General, ConstructionKind::VariantI, ConstructionKind::VariantII,
                             ConstructionKind::VariantIII, ConstructionKind::MultiJump, ConstructionKind::Parallel,
                             ConstructionKind::BRecovery}) {
    if (s == to_string(k)) return k;
  }
  parse_fail("unknown construction '" + s + "'");
}

LimitDeformation Scenario::limit() const {
  return LimitDeformation(domain, RotationProfile1D(domain.a, domain.b, rotation),
                          BVFunction1D(domain.a, domain.b, psi_ac, psi_jumps, psi_staircase));
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) parse_fail("scenario must be a JSON object");
  Scenario s;
  try {
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
      parse_fail("missing integer 'schema_version'");
    }
    s.schema_version = j["schema_version"].get<int>();
    if (s.schema_version != kScenarioSchemaVersion) parse_fail("unsupported schema_version");
    if (!j.contains("name") || !j["name"].is_string()) parse_fail("missing string 'name'");
    s.name = j["name"].get<std::string>();
    if (!j.contains("construction") || !j["construction"].is_string()) parse_fail("missing string 'construction'");
    s.construction = construction_from_string(j["construction"].get<std::string>());

    if (j.contains("domain")) {
      const json& d = j["domain"];
      if (!d.is_object() || !d.contains("x1") || !d.contains("x2")) parse_fail("'domain' needs 'x1' and 'x2' ranges");
      std::tie(s.domain.c, s.domain.d) = range(d["x1"], "domain.x1");
      std::tie(s.domain.a, s.domain.b) = range(d["x2"], "domain.x2");
    }
    if (j.contains("lambda")) s.lambda = number(j, "lambda");

    if (!j.contains("limit") || !j["limit"].is_object()) parse_fail("missing object 'limit'");
    const json& lim = j["limit"];
    if (lim.contains("rotation")) {
      const json& r = lim["rotation"];
      if (r.is_number()) {
        s.rotation.push_back({s.domain.a, s.domain.b, r.get<double>()});
      } else if (r.is_array()) {
        for (const json& p : r) {
          if (!p.is_object()) parse_fail("rotation pieces must be objects");
          s.rotation.push_back({number(p, "lo"), number(p, "hi"), number(p, "angle")});
        }
      } else {
        parse_fail("'limit.rotation' must be an angle or a list of pieces");
      }
    } else {
      s.rotation.push_back({s.domain.a, s.domain.b, 0.0});
    }

    const json psi = lim.contains("psi") ? lim["psi"] : json::object();
    if (!psi.is_object()) parse_fail("'limit.psi' must be an object");
    if (psi.contains("ac")) {
      const json& ac = psi["ac"];
      if (!ac.is_object() || !ac.contains("t") || !ac.contains("v")) parse_fail("'psi.ac' needs 't' and 'v'");
      for (const json& t : ac["t"]) {
        if (!t.is_number()) parse_fail("'psi.ac.t' must hold numbers");
        s.psi_ac.t.push_back(t.get<double>());
      }
      for (const json& v : ac["v"]) s.psi_ac.v.push_back(vec2(v, "psi.ac.v"));
    } else {
      s.psi_ac = PiecewiseLinear{{s.domain.a, s.domain.b}, {{0.0, 0.0}, {0.0, 0.0}}};
    }
    if (psi.contains("jumps")) {
      for (const json& jp : psi["jumps"]) {
        if (!jp.is_object() || !jp.contains("amplitude")) parse_fail("jumps need 'at' and 'amplitude'");
        s.psi_jumps.push_back({number(jp, "at"), vec2(jp["amplitude"], "amplitude")});
      }
    }
    if (psi.contains("staircase")) {
      const json& st = psi["staircase"];
      if (!st.is_object() || !st.contains("depth") || !st["depth"].is_number_integer()) {
        parse_fail("'psi.staircase' needs an integer 'depth'");
      }
      Staircase c;
      c.depth = st["depth"].get<int>();
      c.rise = vec2(st.at("rise"), "staircase.rise");
      if (st.contains("support")) std::tie(c.c0, c.c1) = range(st["support"], "staircase.support");
      s.psi_staircase = c;
    }

    if (j.contains("params")) {
      const json& p = j["params"];
      if (!p.is_object()) parse_fail("'params' must be an object");
      if (p.contains("S")) s.s_angle = number(p, "S");
      if (p.contains("rho")) s.rho = number(p, "rho");
    }
    if (j.contains("eps_sweep")) {
      const json& e = j["eps_sweep"];
      if (!e.is_object() || !e.contains("k_min") || !e.contains("k_max") || !e["k_min"].is_number_integer() ||
          !e["k_max"].is_number_integer()) {
        parse_fail("'eps_sweep' needs integers 'k_min' and 'k_max'");
      }
      s.k_min = e["k_min"].get<int>();
      s.k_max = e["k_max"].get<int>();
      if (e.contains("svg_k")) s.svg_k = e["svg_k"].get<int>();
      if (s.k_min > s.k_max || s.k_min < 0 || s.k_max > 30) parse_fail("'eps_sweep' range is invalid");
    }
    if (j.contains("penalty")) {
      PenaltySpec ps;
      ps.delta = number(j["penalty"], "delta");
      ps.p = number(j["penalty"], "p");
      s.penalty = ps;
    }
    if (j.contains("battery")) {
      s.battery = j["battery"].get<std::string>();
      if (s.battery != "default" && s.battery != "shifted") parse_fail("battery must be 'default' or 'shifted'");
    }
    if (j.contains("outputs")) {
      const json& o = j["outputs"];
      if (!o.is_object()) parse_fail("'outputs' must be an object");
      if (o.contains("csv")) s.csv_path = o["csv"].get<std::string>();
      if (o.contains("svg")) s.svg_path = o["svg"].get<std::string>();
      if (o.contains("tables")) s.tables = o["tables"].get<std::vector<std::string>>();
      for (const std::string& t : s.tables) {
        if (t != "energies" && t != "cc_mismatch") parse_fail("unknown table '" + t + "'");
      }
    }
  } catch (const json::exception& e) {
    parse_fail(std::string("schema violation: ") + e.what());
  }
  if (s.csv_path.empty()) s.csv_path = s.name + ".csv";
  if (s.svg_path.empty()) s.svg_path = s.name + ".svg";
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace bilayer
