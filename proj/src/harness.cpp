#include "cwss/harness.hpp"

#include "cwss/measurement.hpp"
#include "cwss/signal.hpp"

#include "json.hpp"
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cwss::harness {

using Index = Eigen::Index;
using recovery::Method;
using json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

void fnv(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
}

}  // namespace

std::uint64_t input_hash(const CMatrix& b, const CVector& y) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  fnv(h, b.data(), static_cast<std::size_t>(b.size()) * sizeof(Complex));
  fnv(h, y.data(), static_cast<std::size_t>(y.size()) * sizeof(Complex));
  return h;
}

TrialResult run_trial(const config::ExperimentConfig& cfg, std::uint64_t seed) {
  stage("config", [&] { cfg.validate(); });
  const signal::SpectrumProfile& profile = cfg.profile;
  const std::size_t n = profile.grid_size;

  TrialResult out;
  out.seed = seed;
  const signal::FrequencySpectrum spectrum =
      stage("synthesize", [&] { return signal::synthesize_spectrum(profile, mix_seed(seed, Stream::spectrum)); });
  out.truth = spectrum.r;
  out.occupancy = spectrum.occupancy;

  const signal::TimeSignal x = stage("awgn", [&] {
    return signal::add_awgn(signal::spectrum_to_time(spectrum), profile.snr_db, mix_seed(seed, Stream::awgn));
  });
  const measurement::SelectionMatrix sel = stage(
      "selection", [&] { return measurement::make_selection(n, cfg.measurements(), mix_seed(seed, Stream::selection)); });
  out.delta_elem = cfg.delta_elem();
  const measurement::MeasurementSet ms = stage("perturb", [&] {
    return measurement::perturb(measurement::ideal_matrix(sel), out.delta_elem, mix_seed(seed, Stream::distortion),
                                cfg.distortion);
  });
  out.delta_norm = ms.delta_norm;
  const CVector y = stage("acquire", [&] { return measurement::acquire(x, sel); });
  out.y_norm = y.norm();
  out.mu = cfg.mu_factor * out.y_norm;
  switch (cfg.delta_solver) {
    case config::DeltaSolver::elem: out.delta_solver = ms.delta_elem; break;
    case config::DeltaSolver::norm: out.delta_solver = ms.delta_norm; break;
    case config::DeltaSolver::value: out.delta_solver = cfg.delta_solver_value; break;
  }

  const detection::Edges edges = cfg.edges();
  out.active_mask = detection::active_subbands(edges, out.occupancy);
  const double truth_norm = out.truth.norm();

  for (Method method : cfg.methods) {
    MethodOutcome oc;
    oc.param = method == Method::lasso ? out.mu : method == Method::asd ? out.delta_solver : 0.0;
    oc.input_hash = input_hash(ms.observed, y);
    oc.result = stage(std::string(recovery::to_string(method)).c_str(),
                      [&] { return recovery::solve(method, ms.observed, y, oc.param, cfg.solver); });
    oc.relative_error = truth_norm > 0.0 ? (oc.result.r_hat - out.truth).norm() / truth_norm : kNaN;
    if (oc.result.converged() && oc.result.r_hat.squaredNorm() > 0.0) {
      oc.energies = detection::subband_energies(oc.result.r_hat, edges);
      oc.decisions = detection::detect(oc.energies, cfg.threshold);
      oc.exact_detection = oc.decisions == out.active_mask;
    }
    out.outcomes.emplace(method, std::move(oc));
  }

  const auto lasso = out.outcomes.find(Method::lasso);
  const auto asd = out.outcomes.find(Method::asd);
  if (lasso != out.outcomes.end() && asd != out.outcomes.end() && lasso->second.energies.size() > 0 &&
      asd->second.energies.size() > 0) {
    out.eer = detection::eer(asd->second.energies, lasso->second.energies, out.active_mask);
  }
  return out;
}

const MethodRecord* TrialSummary::find(Method m) const {
  for (const auto& r : methods) {
    if (r.method == m) return &r;
  }
  return nullptr;
}

TrialSummary summarize(const TrialResult& trial) {
  TrialSummary s;
  s.index = trial.index;
  s.seed = trial.seed;
  s.delta_norm = trial.delta_norm;
  s.delta_solver = trial.delta_solver;
  s.y_norm = trial.y_norm;
  s.eer = trial.eer;
  for (const auto& [method, oc] : trial.outcomes) {
    MethodRecord r;
    r.method = method;
    r.status = std::string(solver::to_string(oc.result.status));
    r.iterations = oc.result.iterations;
    r.objective = oc.result.objective_value;
    r.epigraph_t = oc.result.epigraph_t.value_or(kNaN);
    r.tight = std::string(recovery::to_string(oc.result.tight));
    r.primal_residual = oc.result.primal_residual;
    r.dual_residual = oc.result.dual_residual;
    r.gap = oc.result.gap;
    r.relative_error = oc.relative_error;
    r.input_hash = oc.input_hash;
    r.energies = oc.energies;
    r.exact_detection = oc.exact_detection;
    s.methods.push_back(std::move(r));
  }
  return s;
}

double MethodSummary::converged_fraction() const {
  return attempted == 0 ? 0.0 : static_cast<double>(converged) / static_cast<double>(attempted);
}

double MethodSummary::detection_rate() const {
  return converged == 0 ? 0.0 : static_cast<double>(exact_detections) / static_cast<double>(converged);
}

const MethodSummary* McReport::find(Method m) const {
  for (const auto& s : methods) {
    if (s.method == m) return &s;
  }
  return nullptr;
}

bool McReport::converged_fraction_ok() const {
  for (const auto& s : methods) {
    if (s.converged_fraction() < min_converged_fraction) return false;
  }
  return !methods.empty();
}

McReport aggregate(const config::ExperimentConfig& cfg, std::vector<TrialSummary> trials) {
  McReport rep;
  rep.config_echo = config::render(cfg, false);
  rep.trials = trials.size();
  rep.base_seed = cfg.seed;
  rep.threshold = cfg.threshold;
  rep.min_converged_fraction = cfg.min_converged_fraction;
  rep.edges = cfg.edges();
  rep.active_mask = detection::active_subbands(rep.edges, signal::occupancy_mask(cfg.profile));
  const auto k = static_cast<Index>(rep.edges.size() - 1);

  for (const auto& t : trials) {
    if (!t.error.empty()) ++rep.failed_trials;
  }

  for (Method method : cfg.methods) {
    MethodSummary ms;
    ms.method = method;
    ms.attempted = trials.size();
    RVector sum = RVector::Zero(k);
    RVector sum_sq = RVector::Zero(k);
    std::size_t with_energy = 0;
    double obj = 0.0, iters = 0.0, err = 0.0;
    for (const auto& t : trials) {
      const MethodRecord* r = t.find(method);
      if (r == nullptr || !r->converged()) continue;
      ++ms.converged;
      obj += r->objective;
      iters += r->iterations;
      err += r->relative_error;
      if (r->exact_detection) ++ms.exact_detections;
      if (r->energies.size() == k) {
        ++with_energy;
        sum += r->energies;
        sum_sq += r->energies.cwiseAbs2();
      }
    }
    if (ms.converged > 0) {
      const auto c = static_cast<double>(ms.converged);
      ms.mean_objective = obj / c;
      ms.mean_iterations = iters / c;
      ms.mean_relative_error = err / c;
    }
    if (with_energy > 0) {
      const auto c = static_cast<double>(with_energy);
      ms.mean_energy = sum / c;
      ms.std_energy = (sum_sq / c - ms.mean_energy.cwiseAbs2()).cwiseMax(0.0).cwiseSqrt();
      ms.mean_decisions = detection::detect(ms.mean_energy, cfg.threshold);
    }
    rep.methods.push_back(std::move(ms));
  }

  const MethodSummary* lasso = rep.find(Method::lasso);
  const MethodSummary* asd = rep.find(Method::asd);
  if (lasso != nullptr && asd != nullptr && lasso->mean_energy.size() == k && asd->mean_energy.size() == k) {
    rep.eer_of_means = detection::eer(asd->mean_energy, lasso->mean_energy, rep.active_mask);
  }
  if (lasso != nullptr && asd != nullptr) {
    RVector sum = RVector::Zero(k);
    std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
    for (const auto& t : trials) {
      if (t.eer.size() != k) continue;
      for (Index j = 0; j < k; ++j) {
        if (std::isnan(t.eer[j])) continue;
        sum[j] += t.eer[j];
        ++count[static_cast<std::size_t>(j)];
      }
    }
    rep.mean_trial_eer = RVector(k);
    for (Index j = 0; j < k; ++j) {
      const std::size_t c = count[static_cast<std::size_t>(j)];
      rep.mean_trial_eer[j] = c > 0 ? sum[j] / static_cast<double>(c) : kNaN;
    }
  }
  rep.trial_summaries = std::move(trials);
  return rep;
}

McReport run_monte_carlo(const config::ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto count = static_cast<std::ptrdiff_t>(cfg.trials);
  std::vector<TrialSummary> summaries(cfg.trials);
  std::vector<std::map<Method, double>> walls(cfg.trials);

#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const std::uint64_t seed = cfg.seed + idx;
    try {
      TrialResult t = run_trial(cfg, seed);
      t.index = idx;
      summaries[idx] = summarize(t);
      for (const auto& [m, oc] : t.outcomes) walls[idx][m] = oc.result.wall_time_s;
    } catch (const std::exception& e) {
      summaries[idx].index = idx;
      summaries[idx].seed = seed;
      summaries[idx].error = e.what();
    }
  }

  McReport rep = aggregate(cfg, std::move(summaries));
  for (Method m : cfg.methods) {
    double total = 0.0;
    std::size_t c = 0;
    for (const auto& w : walls) {
      if (auto it = w.find(m); it != w.end()) {
        total += it->second;
        ++c;
      }
    }
    rep.timing.mean_wall_time_s[m] = c > 0 ? total / static_cast<double>(c) : 0.0;
  }
  rep.timing.total_wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw ConfigError("unknown report format '" + std::string(name) + "' (expected csv or json)");
}

namespace {

json vec_json(const RVector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i])) {
      a.push_back(v[i]);
    } else {
      a.push_back(nullptr);
    }
  }
  return a;
}

RVector vec_from(const json& a) {
  RVector v(static_cast<Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Index>(i)] = a[i].is_null() ? kNaN : a[i].get<double>();
  return v;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double num_from(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

std::string hex(std::uint64_t h) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

json to_json(const McReport& r) {
  json j;
  std::vector<std::string> echo;
  std::istringstream in(r.config_echo);
  for (std::string line; std::getline(in, line);) echo.push_back(line);
  j["config"] = echo;
  j["trials"] = r.trials;
  j["base_seed"] = r.base_seed;
  j["threshold"] = r.threshold;
  j["min_converged_fraction"] = r.min_converged_fraction;
  j["edges"] = r.edges;
  j["active_mask"] = r.active_mask;
  j["failed_trials"] = r.failed_trials;
  j["converged_fraction_ok"] = r.converged_fraction_ok();
  json methods = json::array();
  for (const auto& m : r.methods) {
    json jm;
    jm["method"] = recovery::to_string(m.method);
    jm["attempted"] = m.attempted;
    jm["converged"] = m.converged;
    jm["mean_energy"] = vec_json(m.mean_energy);
    jm["std_energy"] = vec_json(m.std_energy);
    jm["mean_objective"] = num(m.mean_objective);
    jm["mean_iterations"] = num(m.mean_iterations);
    jm["mean_relative_error"] = num(m.mean_relative_error);
    jm["exact_detections"] = m.exact_detections;
    jm["detection_rate"] = num(m.detection_rate());
    jm["mean_decisions"] = m.mean_decisions;
    methods.push_back(jm);
  }
  j["methods"] = methods;
  j["eer_of_means"] = vec_json(r.eer_of_means);
  j["abs_eer_of_means"] = vec_json(r.eer_of_means.cwiseAbs());
  j["mean_trial_eer"] = vec_json(r.mean_trial_eer);
  json trials = json::array();
  for (const auto& t : r.trial_summaries) {
    json jt;
    jt["index"] = t.index;
    jt["seed"] = t.seed;
    jt["error"] = t.error;
    jt["delta_norm"] = num(t.delta_norm);
    jt["delta_solver"] = num(t.delta_solver);
    jt["y_norm"] = num(t.y_norm);
    jt["eer"] = vec_json(t.eer);
    json jms = json::array();
    for (const auto& m : t.methods) {
      json jm;
      jm["method"] = recovery::to_string(m.method);
      jm["status"] = m.status;
      jm["iterations"] = m.iterations;
      jm["objective"] = num(m.objective);
      jm["epigraph_t"] = num(m.epigraph_t);
      jm["tight"] = m.tight;
      jm["primal_residual"] = num(m.primal_residual);
      jm["dual_residual"] = num(m.dual_residual);
      jm["gap"] = num(m.gap);
      jm["relative_error"] = num(m.relative_error);
      jm["input_hash"] = hex(m.input_hash);
      jm["energies"] = vec_json(m.energies);
      jm["exact_detection"] = m.exact_detection;
      jms.push_back(jm);
    }
    jt["methods"] = jms;
    trials.push_back(jt);
  }
  j["trial_records"] = trials;
  return j;
}

json timing_json(const McReport& r) {
  json j;
  json per = json::object();
  for (const auto& [m, t] : r.timing.mean_wall_time_s) per[std::string(recovery::to_string(m))] = t;
  j["mean_wall_time_s"] = per;
  j["total_wall_time_s"] = r.timing.total_wall_time_s;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

}  // namespace

std::string report_to_json(const McReport& report) { return to_json(report).dump(2) + "\n"; }

McReport report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed report JSON: ") + e.what());
  }
  McReport r;
  try {
    for (const auto& line : j.at("config")) r.config_echo += line.get<std::string>() + "\n";
    r.trials = j.at("trials").get<std::size_t>();
    r.base_seed = j.at("base_seed").get<std::uint64_t>();
    r.threshold = j.at("threshold").get<double>();
    r.min_converged_fraction = j.at("min_converged_fraction").get<double>();
    r.edges = j.at("edges").get<detection::Edges>();
    r.active_mask = j.at("active_mask").get<std::vector<bool>>();
    r.failed_trials = j.at("failed_trials").get<std::size_t>();
    for (const auto& jm : j.at("methods")) {
      MethodSummary m;
      m.method = recovery::parse_method(jm.at("method").get<std::string>());
      m.attempted = jm.at("attempted").get<std::size_t>();
      m.converged = jm.at("converged").get<std::size_t>();
      m.mean_energy = vec_from(jm.at("mean_energy"));
      m.std_energy = vec_from(jm.at("std_energy"));
      m.mean_objective = num_from(jm.at("mean_objective"));
      m.mean_iterations = num_from(jm.at("mean_iterations"));
      m.mean_relative_error = num_from(jm.at("mean_relative_error"));
      m.exact_detections = jm.at("exact_detections").get<std::size_t>();
      m.mean_decisions = jm.at("mean_decisions").get<std::vector<bool>>();
      r.methods.push_back(std::move(m));
    }
    r.eer_of_means = vec_from(j.at("eer_of_means"));
    r.mean_trial_eer = vec_from(j.at("mean_trial_eer"));
    for (const auto& jt : j.at("trial_records")) {
      TrialSummary t;
      t.index = jt.at("index").get<std::size_t>();
      t.seed = jt.at("seed").get<std::uint64_t>();
      t.error = jt.at("error").get<std::string>();
      t.delta_norm = num_from(jt.at("delta_norm"));
      t.delta_solver = num_from(jt.at("delta_solver"));
      t.y_norm = num_from(jt.at("y_norm"));
      t.eer = vec_from(jt.at("eer"));
      for (const auto& jm : jt.at("methods")) {
        MethodRecord m;
        m.method = recovery::parse_method(jm.at("method").get<std::string>());
        m.status = jm.at("status").get<std::string>();
        m.iterations = jm.at("iterations").get<int>();
        m.objective = num_from(jm.at("objective"));
        m.epigraph_t = num_from(jm.at("epigraph_t"));
        m.tight = jm.at("tight").get<std::string>();
        m.primal_residual = num_from(jm.at("primal_residual"));
        m.dual_residual = num_from(jm.at("dual_residual"));
        m.gap = num_from(jm.at("gap"));
        m.relative_error = num_from(jm.at("relative_error"));
        m.input_hash = std::stoull(jm.at("input_hash").get<std::string>(), nullptr, 16);
        m.energies = vec_from(jm.at("energies"));
        m.exact_detection = jm.at("exact_detection").get<bool>();
        t.methods.push_back(std::move(m));
      }
      r.trial_summaries.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("report JSON is missing or mistypes a field: ") + e.what());
  }
  return r;
}

McReport read_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read report '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return report_from_json(buf.str());
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

bool identical(const McReport& a, const McReport& b) { return to_json(a).dump() == to_json(b).dump(); }

std::vector<std::string> export_report(const McReport& report, ReportFormat format, const std::string& dir) {
  const std::filesystem::path base(dir);
  std::error_code ec;
  std::filesystem::create_directories(base, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());

  std::vector<std::string> written;
  if (format == ReportFormat::json) {
    write_file(base / "report.json", report_to_json(report));
    write_file(base / "timing.json", timing_json(report).dump(2) + "\n");
    written = {(base / "report.json").string(), (base / "timing.json").string()};
    return written;
  }

  std::ostringstream out;
  const std::size_t k = report.edges.size() - 1;
  out << "row";
  for (std::size_t i = 1; i <= k; ++i) out << ",subband_" << i;
  out << '\n';
  for (const auto& m : report.methods) {
    out << recovery::to_string(m.method);
    for (std::size_t i = 0; i < k; ++i) {
      out << ',' << (m.mean_energy.size() > 0 ? csv_number(m.mean_energy[static_cast<Index>(i)]) : "nan");
    }
    out << '\n';
  }
  if (report.eer_of_means.size() == static_cast<Index>(k)) {
    out << "eer";
    for (std::size_t i = 0; i < k; ++i) out << ',' << csv_number(report.eer_of_means[static_cast<Index>(i)]);
    out << '\n';
  }
  write_file(base / "table.csv", out.str());
  written.push_back((base / "table.csv").string());
  return written;
}

std::string format_summary(const std::vector<std::pair<std::string, McReport>>& reports) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  for (const auto& [label, r] : reports) {
    const std::size_t k = r.edges.size() - 1;
    out << "== " << label << " (" << r.trials << " trials, base seed " << r.base_seed << ", " << r.failed_trials
        << " failed)\n";
    out << std::setw(10) << "subband";
    for (std::size_t i = 1; i <= k; ++i) out << std::setw(9) << i;
    out << '\n' << std::setw(10) << "active";
    for (std::size_t i = 0; i < k; ++i) out << std::setw(9) << (r.active_mask[i] ? "yes" : "-");
    out << '\n';
    for (const auto& m : r.methods) {
      out << std::setw(10) << recovery::to_string(m.method);
      for (std::size_t i = 0; i < k; ++i) {
        if (m.mean_energy.size() > 0) {
          out << std::setw(9) << m.mean_energy[static_cast<Index>(i)];
        } else {
          out << std::setw(9) << "n/a";
        }
      }
      out << "   converged " << m.converged << '/' << m.attempted << ", exact detection " << m.exact_detections
          << '\n';
    }
    if (r.eer_of_means.size() == static_cast<Index>(k)) {
      out << std::setw(10) << "eer";
      for (std::size_t i = 0; i < k; ++i) out << std::setw(9) << r.eer_of_means[static_cast<Index>(i)];
      out << '\n';
    }
  }
  if (reports.size() > 1) {
    out << "== side by side: mean energies per subband\n";
    for (const auto& [label, r] : reports) {
      for (const auto& m : r.methods) {
        out << std::setw(24) << (label + ":" + std::string(recovery::to_string(m.method)));
        for (Index i = 0; i < m.mean_energy.size(); ++i) out << std::setw(9) << m.mean_energy[i];
        out << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace cwss::harness
