#include "cwss/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cwss::config {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> tokens(std::string_view value) {
  std::string text(value);
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

double to_double(std::string_view key, const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "inf" || lower == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw ConfigError("key '" + std::string(key) + "': '" + text + "' is not a number");
  }
  return v;
}

double one_double(std::string_view key, std::string_view value) {
  const auto t = tokens(value);
  if (t.size() != 1) throw ConfigError("key '" + std::string(key) + "' takes one number");
  return to_double(key, t[0]);
}

std::uint64_t one_uint(std::string_view key, std::string_view value) {
  const auto t = tokens(value);
  if (t.size() != 1) throw ConfigError("key '" + std::string(key) + "' takes one integer");
  std::uint64_t v = 0;
  const auto* first = t[0].data();
  const auto* last = first + t[0].size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("key '" + std::string(key) + "': '" + t[0] + "' is not a non-negative integer");
  }
  return v;
}

std::string one_word(std::string_view key, std::string_view value) {
  const auto t = tokens(value);
  if (t.size() != 1) throw ConfigError("key '" + std::string(key) + "' takes one word");
  return t[0];
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

std::size_t ExperimentConfig::measurements() const { return m == 0 ? profile.grid_size / 2 : m; }

double ExperimentConfig::delta_elem() const {
  return delta_scale == DeltaScale::entry ? delta / std::sqrt(static_cast<double>(profile.grid_size)) : delta;
}

detection::Edges ExperimentConfig::edges() const {
  if (subband_edges_hz.empty()) return detection::default_partition(profile.grid_size);
  return detection::partition_from_frequencies(profile, subband_edges_hz);
}

void ExperimentConfig::validate() const {
  profile.validate();
  const std::size_t n = profile.grid_size;
  const std::size_t mm = measurements();
  if (mm < 1 || mm > n) {
    throw DimensionError("measurement count M = " + std::to_string(mm) + " must lie in [1, N = " +
                         std::to_string(n) + "]");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be finite and >= 0");
  if (!(mu_factor >= 0.0) || !std::isfinite(mu_factor)) throw ConfigError("mu_factor must be finite and >= 0");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (!(threshold >= 0.0)) throw ConfigError("threshold must be >= 0");
  if (parallel < 1) throw ConfigError("parallel must be >= 1");
  if (solver.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(solver.tol_primal > 0.0)) throw ConfigError("tol must be > 0");
  if (!(min_converged_fraction >= 0.0 && min_converged_fraction <= 1.0)) {
    throw ConfigError("min_converged_fraction must lie in [0, 1]");
  }
  const bool uses_asd = std::find(methods.begin(), methods.end(), recovery::Method::asd) != methods.end();
  if (uses_asd && delta_solver == DeltaSolver::value && !(delta_solver_value > 0.0)) {
    throw ConfigError("a numeric delta_solver must be > 0");
  }
  if (uses_asd && delta_solver != DeltaSolver::value && !(delta > 0.0)) {
    throw ConfigError("ASD with delta_solver = " + std::string(delta_solver == DeltaSolver::elem ? "elem" : "norm") +
                      " needs delta > 0");
  }
  (void)edges();
}

std::vector<std::string> known_keys() {
  return {"grid_size", "f_low",   "f_high",     "band",      "noise_floor", "snr_db",
          "phase",     "m",       "delta",      "delta_scale", "delta_solver", "distortion",
          "mu_factor", "trials",  "seed",       "methods",   "tol",          "max_iters",
          "threshold", "parallel", "subband_edges", "min_converged_fraction"};
}

void apply(ExperimentConfig& cfg, std::string_view key_in, std::string_view value, bool& bands_replaced) {
  const std::string key = trim(key_in);
  signal::SpectrumProfile& p = cfg.profile;
  if (key == "grid_size") {
    p.grid_size = static_cast<std::size_t>(one_uint(key, value));
  } else if (key == "f_low") {
    p.freq_span.lo = one_double(key, value);
  } else if (key == "f_high") {
    p.freq_span.hi = one_double(key, value);
  } else if (key == "band") {
    const auto t = tokens(value);
    if (t.size() == 1 && t[0] == "none") {
      p.bands.clear();
      bands_replaced = true;
      return;
    }
    if (t.size() != 4) throw ConfigError("key 'band' takes 'f_start f_stop psd_lo psd_hi' or 'none'");
    if (!bands_replaced) {
      p.bands.clear();
      bands_replaced = true;
    }
    p.bands.push_back({to_double(key, t[0]), to_double(key, t[1]), {to_double(key, t[2]), to_double(key, t[3])}});
  } else if (key == "noise_floor") {
    const auto t = tokens(value);
    if (t.size() != 2) throw ConfigError("key 'noise_floor' takes 'lo hi'");
    p.noise_floor_range = {to_double(key, t[0]), to_double(key, t[1])};
  } else if (key == "snr_db") {
    p.snr_db = one_double(key, value);
  } else if (key == "phase") {
    const std::string w = one_word(key, value);
    if (w == "uniform") {
      p.phase_policy = signal::PhasePolicy::uniform;
    } else if (w == "zero") {
      p.phase_policy = signal::PhasePolicy::zero;
    } else {
      throw ConfigError("key 'phase' takes uniform or zero");
    }
  } else if (key == "m") {
    const std::string w = one_word(key, value);
    cfg.m = w == "half" ? 0 : static_cast<std::size_t>(one_uint(key, value));
  } else if (key == "delta") {
    cfg.delta = one_double(key, value);
  } else if (key == "delta_scale") {
    const std::string w = one_word(key, value);
    if (w == "entry") {
      cfg.delta_scale = DeltaScale::entry;
    } else if (w == "absolute") {
      cfg.delta_scale = DeltaScale::absolute;
    } else {
      throw ConfigError("key 'delta_scale' takes entry or absolute");
    }
  } else if (key == "delta_solver") {
    const std::string w = one_word(key, value);
    if (w == "elem") {
      cfg.delta_solver = DeltaSolver::elem;
    } else if (w == "norm") {
      cfg.delta_solver = DeltaSolver::norm;
    } else {
      cfg.delta_solver = DeltaSolver::value;
      cfg.delta_solver_value = to_double(key, w);
    }
  } else if (key == "distortion") {
    cfg.distortion = measurement::parse_distortion_model(one_word(key, value));
  } else if (key == "mu_factor") {
    cfg.mu_factor = one_double(key, value);
  } else if (key == "trials") {
    cfg.trials = static_cast<std::size_t>(one_uint(key, value));
  } else if (key == "seed") {
    cfg.seed = one_uint(key, value);
  } else if (key == "methods") {
    cfg.methods = recovery::parse_methods(value);
  } else if (key == "tol") {
    const double tol = one_double(key, value);
    cfg.solver.tol_primal = cfg.solver.tol_dual = cfg.solver.tol_gap = tol;
  } else if (key == "max_iters") {
    cfg.solver.max_iters = static_cast<int>(one_uint(key, value));
  } else if (key == "threshold") {
    cfg.threshold = one_double(key, value);
  } else if (key == "parallel") {
    cfg.parallel = static_cast<int>(one_uint(key, value));
  } else if (key == "subband_edges") {
    const auto t = tokens(value);
    cfg.subband_edges_hz.clear();
    if (!(t.size() == 1 && t[0] == "default")) {
      for (const auto& s : t) cfg.subband_edges_hz.push_back(to_double(key, s));
    }
  } else if (key == "min_converged_fraction") {
    cfg.min_converged_fraction = one_double(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse(std::string_view text, std::string_view origin) {
  ExperimentConfig cfg;
  bool bands_replaced = false;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      apply(cfg, line.substr(0, eq), line.substr(eq + 1), bands_replaced);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& overrides) {
  bool bands_replaced = false;
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not of the form key=value");
    apply(cfg, o.substr(0, eq), o.substr(eq + 1), bands_replaced);
  }
}

std::string render(const ExperimentConfig& cfg, bool include_execution) {
  const signal::SpectrumProfile& p = cfg.profile;
  std::ostringstream out;
  out << "grid_size = " << p.grid_size << '\n';
  out << "f_low = " << fmt(p.freq_span.lo) << '\n';
  out << "f_high = " << fmt(p.freq_span.hi) << '\n';
  if (p.bands.empty()) out << "band = none\n";
  for (const auto& b : p.bands) {
    out << "band = " << fmt(b.f_start) << ' ' << fmt(b.f_stop) << ' ' << fmt(b.psd_range.lo) << ' '
        << fmt(b.psd_range.hi) << '\n';
  }
  out << "noise_floor = " << fmt(p.noise_floor_range.lo) << ' ' << fmt(p.noise_floor_range.hi) << '\n';
  out << "snr_db = " << fmt(p.snr_db) << '\n';
  out << "phase = " << (p.phase_policy == signal::PhasePolicy::uniform ? "uniform" : "zero") << '\n';
  out << "m = " << cfg.measurements() << '\n';
  out << "delta = " << fmt(cfg.delta) << '\n';
  out << "delta_scale = " << (cfg.delta_scale == DeltaScale::entry ? "entry" : "absolute") << '\n';
  out << "delta_solver = "
      << (cfg.delta_solver == DeltaSolver::elem   ? std::string("elem")
          : cfg.delta_solver == DeltaSolver::norm ? std::string("norm")
                                                  : fmt(cfg.delta_solver_value))
      << '\n';
  out << "distortion = " << measurement::to_string(cfg.distortion) << '\n';
  out << "mu_factor = " << fmt(cfg.mu_factor) << '\n';
  out << "trials = " << cfg.trials << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "methods = ";
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) out << (i ? ", " : "") << recovery::to_string(cfg.methods[i]);
  out << '\n';
  out << "tol = " << fmt(cfg.solver.tol_primal) << '\n';
  out << "max_iters = " << cfg.solver.max_iters << '\n';
  out << "threshold = " << fmt(cfg.threshold) << '\n';
  if (include_execution) out << "parallel = " << cfg.parallel << '\n';
  out << "subband_edges =";
  if (cfg.subband_edges_hz.empty()) out << " default";
  for (double f : cfg.subband_edges_hz) out << ' ' << fmt(f);
  out << '\n';
  out << "min_converged_fraction = " << fmt(cfg.min_converged_fraction) << '\n';
  return out.str();
}

}  // namespace cwss::config
