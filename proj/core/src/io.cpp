#include "rieffel/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rieffel {

namespace {

using nlohmann::json;

json complex_array(std::span<const Complex> values) {
  json arr = json::array();
  for (const Complex& v : values) arr.push_back({v.real(), v.imag()});
  return arr;
}

std::vector<Complex> parse_complex_array(const json& arr) {
  std::vector<Complex> out;
  out.reserve(arr.size());
  for (const auto& e : arr) out.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write_file_atomic: short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

void save_grid_function(const std::string& path, const GridFunction& f) {
  json j;
  j["type"] = "grid_function";
  j["n"] = f.grid().dim();
  j["N"] = f.grid().samples();
  j["L"] = f.grid().length();
  j["k"] = f.k();
  j["space"] = f.space() == Space::position ? "position" : "frequency";
  j["entries"] = complex_array(f.raw());
  write_file_atomic(path, j.dump());
}

GridFunction load_grid_function(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_grid_function: cannot open " + path);
  json j = json::parse(in);
  if (j.at("type") != "grid_function")
    throw std::runtime_error("load_grid_function: wrong container type in " + path);
  TorusGrid grid(j.at("n").get<int>(), j.at("N").get<int>(), j.at("L").get<double>());
  Space space = j.at("space") == "position" ? Space::position : Space::frequency;
  return GridFunction(grid, j.at("k").get<int>(), space, parse_complex_array(j.at("entries")));
}

void save_dense_operator(const std::string& path, const TorusGrid& grid, int k,
                         const Eigen::MatrixXcd& matrix) {
  json j;
  j["type"] = "dense_operator";
  j["n"] = grid.dim();
  j["N"] = grid.samples();
  j["L"] = grid.length();
  j["k"] = k;
  j["dim"] = matrix.rows();
  json arr = json::array();
  for (Eigen::Index r = 0; r < matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < matrix.cols(); ++c)
      arr.push_back({matrix(r, c).real(), matrix(r, c).imag()});
  j["entries"] = std::move(arr);
  write_file_atomic(path, j.dump());
}

Eigen::MatrixXcd load_dense_operator(const std::string& path, TorusGrid* grid_out, int* k_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dense_operator: cannot open " + path);
  json j = json::parse(in);
  if (j.at("type") != "dense_operator")
    throw std::runtime_error("load_dense_operator: wrong container type in " + path);
  TorusGrid grid(j.at("n").get<int>(), j.at("N").get<int>(), j.at("L").get<double>());
  if (grid_out) *grid_out = grid;
  if (k_out) *k_out = j.at("k").get<int>();
  Eigen::Index d = j.at("dim").get<Eigen::Index>();
  Eigen::MatrixXcd m(d, d);
  const auto& arr = j.at("entries");
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto& e = arr.at(r * d + c);
      m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return m;
}

void export_grid_function_csv(const std::string& path, const GridFunction& f) {
  const TorusGrid& grid = f.grid();
  int n = grid.dim(), k = f.k(), kk = k * k;
  std::ostringstream out;
  for (int ax = 0; ax < n; ++ax) out << (ax ? "," : "") << (f.space() == Space::position ? "x" : "xi") << ax;
  for (int e = 0; e < kk; ++e) out << ",re" << e / k << e % k << ",im" << e / k << e % k;
  out << "\n";
  int idx[8];
  for (std::int64_t m = 0; m < grid.point_count(); ++m) {
    grid.decode(m, idx);
    for (int ax = 0; ax < n; ++ax) {
      double c = f.space() == Space::position ? grid.coord(idx[ax]) : grid.freq(idx[ax]);
      out << (ax ? "," : "") << format_double(c);
    }
    const Complex* p = f.at(m);
    for (int e = 0; e < kk; ++e)
      out << "," << format_double(p[e].real()) << "," << format_double(p[e].imag());
    out << "\n";
  }
  write_file_atomic(path, out.str());
}

void export_phase_space_csv(const std::string& path, const PhaseSpaceFunction& a) {
  const TorusGrid& grid = a.grid();
  int n = grid.dim(), k = a.k(), kk = k * k;
  std::ostringstream out;
  for (int ax = 0; ax < n; ++ax) out << (ax ? "," : "") << "x" << ax;
  for (int ax = 0; ax < n; ++ax) out << ",xi" << ax;
  for (int e = 0; e < kk; ++e) out << ",re" << e / k << e % k << ",im" << e / k << e % k;
  out << "\n";
  int mi[8], qi[8];
  for (std::int64_t m = 0; m < grid.point_count(); ++m) {
    grid.decode(m, mi);
    for (std::int64_t q = 0; q < grid.point_count(); ++q) {
      grid.decode(q, qi);
      for (int ax = 0; ax < n; ++ax) out << (ax ? "," : "") << format_double(grid.coord(mi[ax]));
      for (int ax = 0; ax < n; ++ax) out << "," << format_double(grid.freq(qi[ax]));
      const Complex* p = a.at(m, q);
      for (int e = 0; e < kk; ++e)
        out << "," << format_double(p[e].real()) << "," << format_double(p[e].imag());
      out << "\n";
    }
  }
  write_file_atomic(path, out.str());
}

}  // namespace rieffel
