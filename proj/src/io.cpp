#include "cwss/io.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace cwss::io {

using Index = Eigen::Index;

namespace {

std::ofstream open_for_write(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << std::setprecision(17);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  auto out = open_for_write(path);
  out << text;
  finish(out, path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_spectrum_csv(const std::string& path, const signal::SpectrumProfile& profile,
                        const signal::FrequencySpectrum& spectrum) {
  auto out = open_for_write(path);
  out << "bin_index,freq_hz,re,im,magnitude,occupancy\n";
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const Complex v = spectrum.r[static_cast<Index>(k)];
    out << k << ',' << profile.bin_center(k) << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v) << ','
        << (spectrum.occupancy[k] ? 1 : 0) << '\n';
  }
  finish(out, path);
}

void write_occupancy_csv(const std::string& path, const signal::SpectrumProfile& profile,
                         const std::vector<bool>& occupancy) {
  auto out = open_for_write(path);
  out << "bin_index,freq_hz,occupancy\n";
  for (std::size_t k = 0; k < occupancy.size(); ++k) {
    out << k << ',' << profile.bin_center(k) << ',' << (occupancy[k] ? 1 : 0) << '\n';
  }
  finish(out, path);
}

void write_recovered_csv(const std::string& path, const CVector& r_hat) {
  auto out = open_for_write(path);
  out << "bin,re,im,magnitude\n";
  for (Index k = 0; k < r_hat.size(); ++k) {
    out << k << ',' << r_hat[k].real() << ',' << r_hat[k].imag() << ',' << std::abs(r_hat[k]) << '\n';
  }
  finish(out, path);
}

void write_matrix_csv(const std::string& path, const CMatrix& m) {
  auto out = open_for_write(path);
  out << "row,col,re,im\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << i << ',' << j << ',' << m(i, j).real() << ',' << m(i, j).imag() << '\n';
  }
  finish(out, path);
}

void write_selection(const std::string& path, const measurement::SelectionMatrix& sel) {
  auto out = open_for_write(path);
  for (std::size_t r : sel.rows) out << r << '\n';
  finish(out, path);
}

std::string diagnostics_json(const std::vector<recovery::RecoveryResult>& results, const std::string& config_echo) {
  using json = nlohmann::ordered_json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  std::vector<std::string> echo;
  std::istringstream in(config_echo);
  for (std::string line; std::getline(in, line);) echo.push_back(line);
  j["config"] = echo;
  json arr = json::array();
  for (const auto& r : results) {
    json d;
    d["method"] = recovery::to_string(r.method);
    d["status"] = solver::to_string(r.status);
    d["objective"] = num(r.objective_value);
    d["t"] = r.epigraph_t ? num(*r.epigraph_t) : json(nullptr);
    d["tight"] = recovery::to_string(r.tight);
    d["primal_residual"] = num(r.primal_residual);
    d["dual_residual"] = num(r.dual_residual);
    d["gap"] = num(r.gap);
    d["iterations"] = r.iterations;
    d["wall_time_s"] = r.wall_time_s;
    arr.push_back(d);
  }
  j["results"] = arr;
  return j.dump(2) + "\n";
}

void write_plot_csv(const std::string& path, const signal::SpectrumProfile& profile, const harness::TrialResult& trial) {
  auto out = open_for_write(path);
  out << "bin,freq_hz,truth";
  for (const auto& [m, oc] : trial.outcomes) out << ',' << recovery::to_string(m);
  out << '\n';
  for (Index k = 0; k < trial.truth.size(); ++k) {
    out << k << ',' << profile.bin_center(static_cast<std::size_t>(k)) << ',' << std::abs(trial.truth[k]);
    for (const auto& [m, oc] : trial.outcomes) out << ',' << std::abs(oc.result.r_hat[k]);
    out << '\n';
  }
  finish(out, path);
}

}  // namespace cwss::io
