#include "phasetori/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace phasetori {

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string{};
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    if (strip(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    cfg[key] = val;
  }
  return cfg;
}

double cfg_double(const Config& c, const std::string& key, double fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  std::size_t pos = 0;
  const double v = std::stod(it->second, &pos);
  if (pos != it->second.size()) throw ConfigError("bad numeric value for " + key);
  return v;
}

int cfg_int(const Config& c, const std::string& key, int fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  std::size_t pos = 0;
  const int v = std::stoi(it->second, &pos);
  if (pos != it->second.size()) throw ConfigError("bad integer value for " + key);
  return v;
}

std::string cfg_str(const Config& c, const std::string& key, const std::string& fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : it->second;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp);
    out << body;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("cannot rename " + tmp + " -> " + path);
}

void write_branch_csv(const std::string& path, const Branch& branch) {
  std::ostringstream out;
  int nmul = 0;
  for (const auto& p : branch.points) nmul = std::max(nmul, int(p.spectrum.multipliers.size()));
  out << "step,delta,r,period,measure";
  for (int i = 0; i < nmul; ++i) out << ",mu" << i + 1 << "_re,mu" << i + 1 << "_im";
  out << ",trivial_error,stable,event\n";
  for (std::size_t s = 0; s < branch.points.size(); ++s) {
    const auto& p = branch.points[s];
    out << s << ',' << format_g17(p.orbit.delta) << ',' << format_g17(p.orbit.r) << ','
        << format_g17(p.orbit.period) << ',' << format_g17(p.measure);
    for (int i = 0; i < nmul; ++i) {
      if (i < int(p.spectrum.multipliers.size()))
        out << ',' << format_g17(p.spectrum.multipliers[i].real()) << ','
            << format_g17(p.spectrum.multipliers[i].imag());
      else
        out << ",nan,nan";
    }
    if (p.spectrum.valid)
      out << ',' << format_g17(p.spectrum.trivial_error) << ',' << (p.spectrum.stable() ? 1 : 0);
    else
      out << ",nan,-1";  // no spectrum computed (e.g. homoclinic blow-up)
    out << ',' << p.event << '\n';
  }
  write_text_atomic(path, out.str());
}

void write_fold_csv(const std::string& path, const FoldCurve& curve) {
  std::ostringstream out;
  out << "step,delta,r,period,cusp\n";
  for (std::size_t s = 0; s < curve.points.size(); ++s) {
    const auto& p = curve.points[s];
    const bool cusp = std::find(curve.cusp_indices.begin(), curve.cusp_indices.end(), int(s)) !=
                      curve.cusp_indices.end();
    out << s << ',' << format_g17(p.delta) << ',' << format_g17(p.r) << ','
        << format_g17(p.period) << ',' << (cusp ? 1 : 0) << '\n';
  }
  write_text_atomic(path, out.str());
}

void write_orbit_csv(const std::string& path, const CollocationScheme& scheme,
                     const OrbitSegment& orbit) {
  std::ostringstream out;
  out << "t";
  for (int c = 0; c < scheme.dim; ++c) out << ",u" << c + 1;
  out << '\n';
  for (int i = 0; i < scheme.nnode(); ++i) {
    out << format_g17(scheme.tnodes[i]);
    for (int c = 0; c < scheme.dim; ++c)
      out << ',' << format_g17(orbit.u[i * scheme.dim + c]);
    out << '\n';
  }
  write_text_atomic(path, out.str());
}

namespace {

nlohmann::json orbit_to_json(const OrbitSegment& o) {
  return {{"delta", o.delta},
          {"r", o.r},
          {"period", o.period},
          {"windings", std::vector<int>(o.windings.data(), o.windings.data() + o.windings.size())},
          {"u", std::vector<double>(o.u.data(), o.u.data() + o.u.size())}};
}

OrbitSegment orbit_from_json(const nlohmann::json& j) {
  OrbitSegment o;
  o.delta = j.at("delta").get<double>();
  o.r = j.at("r").get<double>();
  o.period = j.at("period").get<double>();
  const auto w = j.at("windings").get<std::vector<int>>();
  o.windings = Eigen::Map<const Eigen::VectorXi>(w.data(), long(w.size()));
  const auto u = j.at("u").get<std::vector<double>>();
  o.u = Eigen::Map<const Vec>(u.data(), long(u.size()));
  return o;
}

}  // namespace

void write_events_json(const std::string& path, const Branch& branch) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& ev : branch.events) {
    j.push_back({{"kind", event_code(ev.kind)},
                 {"delta", ev.delta},
                 {"r", ev.r},
                 {"measure", ev.measure},
                 {"point_index", ev.point_index},
                 {"localization_tol", ev.localization_tol},
                 {"orbit", orbit_to_json(ev.orbit)}});
  }
  nlohmann::json root = {{"events", j},
                         {"closed_loop", branch.closed_loop},
                         {"termination", branch.termination}};
  write_text_atomic(path, root.dump(2) + "\n");
}

void write_orbits_json(const std::string& path, const Branch& branch, int stride) {
  if (stride < 1) stride = 1;
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t s = 0; s < branch.points.size(); ++s) {
    if (s % std::size_t(stride) != 0 && s + 1 != branch.points.size()) continue;
    nlohmann::json j = orbit_to_json(branch.points[s].orbit);
    j["step"] = s;
    pts.push_back(std::move(j));
  }
  write_text_atomic(path, nlohmann::json{{"orbits", pts}}.dump() + "\n");
}

OrbitSegment read_orbit_json(const std::string& path, int id) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json root;
  in >> root;
  for (const auto& j : root.at("orbits"))
    if (j.at("step").get<int>() == id) return orbit_from_json(j);
  throw ConfigError("no stored orbit with step id " + std::to_string(id) + " in " + path);
}

OrbitSegment read_event_orbit(const std::string& path, const std::string& code, int index) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json root;
  in >> root;
  int seen = 0;
  for (const auto& j : root.at("events")) {
    if (!code.empty() && j.at("kind").get<std::string>() != code) continue;
    if (seen++ == index) return orbit_from_json(j.at("orbit"));
  }
  throw ConfigError("no matching event (code=" + (code.empty() ? "any" : code) +
                    ", index=" + std::to_string(index) + ") in " + path);
}

}  // namespace phasetori
