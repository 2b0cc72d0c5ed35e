#include "io/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "core/errors.hpp"

namespace vlaser {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ParseError("value for '" + key + "' is not a finite number: '" + value + "'");
  }
}

long long to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ParseError("value for '" + key + "' is not an integer: '" + value + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("");
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ParseError("value for '" + key + "' is not an unsigned integer: '" + value +
                     "'");
  }
}

std::string checked_param_name(const std::string& key, const std::string& value) {
  try {
    param_field(value);
  } catch (const ValidationError&) {
    throw ParseError("value for '" + key + "' is not a parameter name: '" + value + "'");
  }
  return value;
}

std::string checked_choice(const std::string& key, const std::string& value,
                           std::initializer_list<const char*> choices) {
  for (const char* c : choices)
    if (value == c) return value;
  std::string msg = "value for '" + key + "' must be one of {";
  bool first = true;
  for (const char* c : choices) {
    if (!first) msg += ", ";
    msg += c;
    first = false;
  }
  throw ParseError(msg + "}: got '" + value + "'");
}

struct KeyHandler {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::vector<KeyHandler> build_handlers() {
  std::vector<KeyHandler> h;

  const auto add_double = [&](const char* key, double RunConfig::*field) {
    h.push_back({key,
                 [key, field](RunConfig& c, const std::string& v) {
                   c.*field = to_double(key, v);
                 },
                 [field](const RunConfig& c) { return fmt_double(c.*field); }});
  };

  h.push_back({"mode",
               [](RunConfig& c, const std::string& v) {
                 c.mode = checked_choice("mode", v,
                                         {"steady", "stability", "threshold", "floquet",
                                          "ramp", "trajectory", "sweep2d", "estimates"});
               },
               [](const RunConfig& c) { return c.mode; }});

  // Physical parameters map straight onto their fields; n_atoms additionally
  // enforces integrality here at the input boundary (internal scans treat it
  // as continuous).
  for (const std::string& name : param_names()) {
    double PhysicalParams::*field = param_field(name);
    if (name == "n_atoms") {
      h.push_back({name,
                   [name, field](RunConfig& c, const std::string& v) {
                     const double x = to_double(name, v);
                     if (x < 0.0 || x != std::floor(x) || x > 1e15)
                       throw ParseError("value for 'n_atoms' must be a non-negative "
                                        "integer: '" + v + "'");
                     c.params.*field = x;
                   },
                   [field](const RunConfig& c) { return fmt_double(c.params.*field); }});
    } else {
      h.push_back({name,
                   [name, field](RunConfig& c, const std::string& v) {
                     c.params.*field = to_double(name, v);
                   },
                   [field](const RunConfig& c) { return fmt_double(c.params.*field); }});
    }
  }

  h.push_back({"point_mode",
               [](RunConfig& c, const std::string& v) {
                 c.point_mode =
                     checked_choice("point_mode", v, {"stability", "floquet", "both"});
               },
               [](const RunConfig& c) { return c.point_mode; }});

  const auto add_axis = [&](const char* prefix, AxisSpec RunConfig::*axis) {
    const std::string p(prefix);
    h.push_back({p + "_param",
                 [p, axis](RunConfig& c, const std::string& v) {
                   (c.*axis).param = checked_param_name(p + "_param", v);
                 },
                 [axis](const RunConfig& c) { return (c.*axis).param; }});
    h.push_back({p + "_lo",
                 [p, axis](RunConfig& c, const std::string& v) {
                   (c.*axis).lo = to_double(p + "_lo", v);
                 },
                 [axis](const RunConfig& c) { return fmt_double((c.*axis).lo); }});
    h.push_back({p + "_hi",
                 [p, axis](RunConfig& c, const std::string& v) {
                   (c.*axis).hi = to_double(p + "_hi", v);
                 },
                 [axis](const RunConfig& c) { return fmt_double((c.*axis).hi); }});
    h.push_back({p + "_count",
                 [p, axis](RunConfig& c, const std::string& v) {
                   const long long n = to_int(p + "_count", v);
                   if (n < 2 || n > 1000000)
                     throw ParseError("value for '" + p +
                                      "_count' must be an integer in [2, 1000000]");
                   (c.*axis).count = static_cast<int>(n);
                 },
                 [axis](const RunConfig& c) { return std::to_string((c.*axis).count); }});
  };
  add_axis("axis1", &RunConfig::axis1);
  add_axis("axis2", &RunConfig::axis2);

  h.push_back({"threshold_axis",
               [](RunConfig& c, const std::string& v) {
                 c.threshold.axis = checked_param_name("threshold_axis", v);
               },
               [](const RunConfig& c) { return c.threshold.axis; }});
  h.push_back({"threshold_lo",
               [](RunConfig& c, const std::string& v) {
                 c.threshold.lo = to_double("threshold_lo", v);
               },
               [](const RunConfig& c) { return fmt_double(c.threshold.lo); }});
  h.push_back({"threshold_hi",
               [](RunConfig& c, const std::string& v) {
                 c.threshold.hi = to_double("threshold_hi", v);
               },
               [](const RunConfig& c) { return fmt_double(c.threshold.hi); }});

  h.push_back({"ramp_param",
               [](RunConfig& c, const std::string& v) {
                 c.ramp.param = checked_param_name("ramp_param", v);
               },
               [](const RunConfig& c) { return c.ramp.param; }});
  h.push_back({"ramp_rate",
               [](RunConfig& c, const std::string& v) {
                 c.ramp.rate = to_double("ramp_rate", v);
               },
               [](const RunConfig& c) { return fmt_double(c.ramp.rate); }});
  h.push_back({"ramp_time",
               [](RunConfig& c, const std::string& v) {
                 c.ramp.time = to_double("ramp_time", v);
               },
               [](const RunConfig& c) { return fmt_double(c.ramp.time); }});
  h.push_back({"ramp_grid",
               [](RunConfig& c, const std::string& v) {
                 const long long n = to_int("ramp_grid", v);
                 if (n < 2 || n > 1000000)
                   throw ParseError("value for 'ramp_grid' must be an integer in "
                                    "[2, 1000000]");
                 c.ramp.grid = static_cast<int>(n);
               },
               [](const RunConfig& c) { return std::to_string(c.ramp.grid); }});
  h.push_back({"ramp_window",
               [](RunConfig& c, const std::string& v) {
                 c.ramp.window = to_double("ramp_window", v);
               },
               [](const RunConfig& c) { return fmt_double(c.ramp.window); }});
  h.push_back({"ramp_seed_alpha",
               [](RunConfig& c, const std::string& v) {
                 c.ramp.seed_alpha = to_double("ramp_seed_alpha", v);
               },
               [](const RunConfig& c) { return fmt_double(c.ramp.seed_alpha); }});

  add_double("trajectory_time", &RunConfig::trajectory_time);
  add_double("sample_stride", &RunConfig::sample_stride);
  h.push_back({"trajectory_ramped",
               [](RunConfig& c, const std::string& v) {
                 c.trajectory_ramped =
                     checked_choice("trajectory_ramped", v, {"true", "false"}) == "true";
               },
               [](const RunConfig& c) {
                 return std::string(c.trajectory_ramped ? "true" : "false");
               }});

  h.push_back({"out", [](RunConfig& c, const std::string& v) { c.out = v; },
               [](const RunConfig& c) { return c.out; }});
  h.push_back({"format",
               [](RunConfig& c, const std::string& v) {
                 c.format = checked_choice("format", v, {"csv", "json"});
               },
               [](const RunConfig& c) { return c.format; }});
  h.push_back({"seed",
               [](RunConfig& c, const std::string& v) { c.seed = to_u64("seed", v); },
               [](const RunConfig& c) { return std::to_string(c.seed); }});
  h.push_back({"workers",
               [](RunConfig& c, const std::string& v) {
                 const long long n = to_int("workers", v);
                 if (n < 1 || n > 1024)
                   throw ParseError("value for 'workers' must be an integer in [1, 1024]");
                 c.workers = static_cast<int>(n);
               },
               [](const RunConfig& c) { return std::to_string(c.workers); }});

  return h;
}

const std::vector<KeyHandler>& handlers() {
  static const std::vector<KeyHandler> h = build_handlers();
  return h;
}

const KeyHandler& find_handler(const std::string& key) {
  for (const auto& h : handlers())
    if (h.key == key) return h;
  throw ParseError("unknown configuration key '" + key + "'");
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
  find_handler(key).set(c, value);
}

std::string get_key(const RunConfig& c, const std::string& key) {
  return find_handler(key).get(c);
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value': '" +
                       line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ParseError("line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second)
      throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      set_key(c, key, value);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const RunConfig& c) {
  std::ostringstream out;
  for (const auto& h : handlers()) out << h.key << " = " << h.get(c) << "\n";
  return out.str();
}

void RunConfig::validate() const {
  params.validate();
  if (params.n_atoms != std::floor(params.n_atoms))
    throw ValidationError("n_atoms must be integer-valued at the input boundary");

  const auto check_axis = [](const AxisSpec& a, const char* name) {
    if (a.param.empty())
      throw ValidationError(std::string(name) + "_param is required for sweep2d");
    param_field(a.param);
    if (!(std::isfinite(a.lo) && std::isfinite(a.hi)))
      throw ValidationError(std::string(name) + " bounds must be finite");
    if (a.count < 2)
      throw ValidationError(std::string(name) + "_count must be at least 2");
  };

  if (mode == "sweep2d") {
    check_axis(axis1, "axis1");
    check_axis(axis2, "axis2");
  } else if (mode == "threshold") {
    param_field(threshold.axis);
    if (!(threshold.lo < threshold.hi))
      throw ValidationError("threshold_lo must be below threshold_hi");
  } else if (mode == "ramp") {
    param_field(ramp.param);
    if (!(ramp.rate > 0.0)) throw ValidationError("ramp_rate must be positive");
    if (!(ramp.time > 0.0)) throw ValidationError("ramp_time must be positive");
    if (ramp.grid < 2) throw ValidationError("ramp_grid must be at least 2");
    if (ramp.window < 0.0) throw ValidationError("ramp_window must be non-negative");
  } else if (mode == "trajectory") {
    if (!(trajectory_time > 0.0))
      throw ValidationError("trajectory_time must be positive");
    if (!(sample_stride > 0.0) || sample_stride > trajectory_time)
      throw ValidationError("sample_stride must be positive and fit the horizon");
    if (trajectory_ramped) {
      param_field(ramp.param);
      if (!(ramp.rate > 0.0)) throw ValidationError("ramp_rate must be positive");
      if (!(ramp.time > 0.0)) throw ValidationError("ramp_time must be positive");
    }
  }
  if (workers < 1) throw ValidationError("workers must be at least 1");
}

}  // namespace vlaser
