#include "backcom/scenario_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace backcom {

namespace {

using nlohmann::json;

int line_of_key(const std::string& text, const std::string& key) {
  const std::size_t pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

class Reader {
 public:
  Reader(const json& doc, const std::string& text, const std::string& source)
      : doc_(doc), text_(text), source_(source) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    std::ostringstream os;
    os << source_;
    const int line = line_of_key(text_, key);
    if (line > 0) os << ":" << line;
    os << ": field '" << key << "': " << message;
    throw ConfigError(os.str());
  }

  bool has(const std::string& key) const { return doc_.contains(key); }

  double number(const std::string& key) const {
    const json& v = doc_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }

  int integer(const std::string& key) const {
    const json& v = doc_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  Position position(const std::string& key) const {
    const json& v = doc_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(key, "expected [x, y]");
    }
    return Position(v[0].get<double>(), v[1].get<double>());
  }

  std::string text(const std::string& key) const {
    const json& v = doc_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

 private:
  const json& doc_;
  const std::string& text_;
  const std::string& source_;
};

}  // namespace

ScenarioParams parse_scenario(const std::string& text, const std::string& source, std::optional<Protocol> protocol) {
  json doc = json::object();
  if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(source + ":" + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
                        ": malformed JSON: " + e.what());
    }
  }
  if (!doc.is_object()) throw ConfigError(source + ": the scenario must be a JSON object");
  const Reader in(doc, text, source);

  static const std::vector<std::string> known = {
      "protocol", "period_t", "n_slots",  "delta",    "beta0",  "beta0_db",    "sigma_r2",   "sigma_r2_db",
      "sigma_u2", "sigma_u2_db", "sigma2_db", "p_tx",  "altitude_h", "v_max",    "eta",        "p_eps",
      "mu",       "p_c",      "m_exp",    "rician_k", "rician_k_db", "w_b",     "w_r",        "q_init",
      "q_final"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) in.fail(it.key(), "unknown key");
  }
  auto exclusive = [&](const std::string& a, const std::string& b) {
    if (in.has(a) && in.has(b)) in.fail(b, "conflicts with '" + a + "'");
  };
  exclusive("beta0", "beta0_db");
  exclusive("sigma_r2", "sigma_r2_db");
  exclusive("sigma_u2", "sigma_u2_db");
  exclusive("sigma_r2", "sigma2_db");
  exclusive("sigma_r2_db", "sigma2_db");
  exclusive("sigma_u2", "sigma2_db");
  exclusive("sigma_u2_db", "sigma2_db");
  exclusive("rician_k", "rician_k_db");

  ScenarioParams p;
  if (in.has("protocol")) {
    try {
      p.protocol = protocol_from_string(in.text("protocol"));
    } catch (const ConfigError& e) {
      in.fail("protocol", e.what());
    }
    if (protocol && *protocol != p.protocol) {
      in.fail("protocol", "scenario says " + to_string(p.protocol) + " but " + to_string(*protocol) + " was requested");
    }
  } else if (protocol) {
    p.protocol = *protocol;
  }

  const std::map<std::string, double*> plain = {
      {"beta0", &p.beta0},   {"sigma_r2", &p.sigma_r2}, {"sigma_u2", &p.sigma_u2}, {"p_tx", &p.p_tx},
      {"altitude_h", &p.altitude_h}, {"v_max", &p.v_max}, {"eta", &p.eta},     {"mu", &p.mu},
      {"p_c", &p.p_c},       {"m_exp", &p.m_exp},       {"rician_k", &p.rician_k}, {"delta", &p.delta}};
  for (const auto& [key, target] : plain) {
    if (in.has(key)) *target = in.number(key);
  }
  if (in.has("beta0_db")) p.beta0 = db_to_linear(in.number("beta0_db"));
  if (in.has("sigma_r2_db")) p.sigma_r2 = db_to_linear(in.number("sigma_r2_db"));
  if (in.has("sigma_u2_db")) p.sigma_u2 = db_to_linear(in.number("sigma_u2_db"));
  if (in.has("sigma2_db")) p.sigma_r2 = p.sigma_u2 = db_to_linear(in.number("sigma2_db"));
  if (in.has("rician_k_db")) p.rician_k = db_to_linear(in.number("rician_k_db"));
  p.p_eps = in.has("p_eps") ? in.number("p_eps") : p.p_c / 5.0;
  if (in.has("w_b")) p.w_b = in.position("w_b");
  if (in.has("w_r")) p.w_r = in.position("w_r");
  if (in.has("q_init")) p.q_init = in.position("q_init");
  if (in.has("q_final")) p.q_final = in.position("q_final");

  const double period = in.has("period_t") ? in.number("period_t") : p.period_t;
  if (!(period > 0.0)) in.fail("period_t", "must be positive");
  if (in.has("delta") && !(p.delta > 0.0)) in.fail("delta", "must be positive");
  if (in.has("n_slots")) {
    const int n = in.integer("n_slots");
    if (n < 1) in.fail("n_slots", "must be at least 1");
    p.period_t = period;
    p.n_slots = n;
    if (!in.has("delta")) p.delta = period / n;
  } else {
    set_period(p, period);
  }

  try {
    p.validate();
  } catch (const ConfigError& e) {
    const std::string message = e.what();
    const std::string field = message.substr(0, message.find(' '));
    for (const std::string& key : {field, field + "_db"}) {
      if (in.has(key)) in.fail(key, message);
    }
    if ((field == "sigma_r2" || field == "sigma_u2") && in.has("sigma2_db")) in.fail("sigma2_db", message);
    throw ConfigError(source + ": " + message);
  }
  return p;
}

ScenarioParams load_scenario(const std::string& path, std::optional<Protocol> protocol) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError(path + ": cannot open scenario file");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_scenario(buffer.str(), path, protocol);
}

}  // namespace backcom
