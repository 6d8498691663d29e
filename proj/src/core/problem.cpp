#include "levinv/problem.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "levinv/errors.hpp"
#include "levinv/numkit/linalg.hpp"

namespace levinv {

double matrix_inf_norm(const DenseMatrix& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double row_sum = 0.0;
    for (double v : a.row(i)) row_sum += std::abs(v);
    worst = std::max(worst, row_sum);
  }
  return worst;
}

void validate_instance(const ProblemInstance& inst) {
  if (inst.d < 1 || inst.n < inst.d) {
    throw DimensionMismatch("instance needs n >= d >= 1, got n=" +
                            std::to_string(inst.n) + " d=" + std::to_string(inst.d));
  }
  if (inst.A.rows() != inst.n || inst.A.cols() != inst.d) {
    throw DimensionMismatch("A is " + std::to_string(inst.A.rows()) + "x" +
                            std::to_string(inst.A.cols()) + ", expected " +
                            std::to_string(inst.n) + "x" + std::to_string(inst.d));
  }
  if (inst.b.size() != inst.n) throw DimensionMismatch("b must have n entries");
  if (inst.c.size() != inst.d) throw DimensionMismatch("c must have d entries");
  if (inst.w.size() != inst.n) throw DimensionMismatch("w must have n entries");
  if (!inst.x_star.empty() && inst.x_star.size() != inst.d) {
    throw DimensionMismatch("x_star must be empty or have d entries");
  }
  const auto finite = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!inst.A.all_finite() || !finite(inst.b) || !finite(inst.c) || !finite(inst.w)) {
    throw std::invalid_argument("instance entries must be finite");
  }
  for (std::size_t i = 0; i < inst.n; ++i) {
    if (!(inst.w[i] > 0.0)) {
      throw NonPositiveWeight("w[" + std::to_string(i) + "] = " +
                              format_double(inst.w[i]) + " must be > 0");
    }
  }
  (void)qr_thin(inst.A);  // throws RankDeficient
}

FeasibilityReport validate_at(const ProblemInstance& inst, std::span<const double> x) {
  if (x.size() != inst.d || inst.A.rows() != inst.n || inst.b.size() != inst.n) {
    throw DimensionMismatch("validate_at: x has " + std::to_string(x.size()) +
                            " entries, instance has d=" + std::to_string(inst.d));
  }
  FeasibilityReport report;
  report.tolerance =
      1e-10 * (1.0 + norm_inf(inst.b) + matrix_inf_norm(inst.A) * norm_inf(x));
  report.min_abs_residual = std::numeric_limits<double>::infinity();
  const Vector ax = matvec(inst.A, x);
  for (std::size_t i = 0; i < inst.n; ++i) {
    const double s = std::abs(ax[i] - inst.b[i]);
    if (s < report.min_abs_residual) {
      report.min_abs_residual = s;
      report.worst_row = i;
    }
  }
  report.pass = report.min_abs_residual > report.tolerance;
  return report;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void append_array(std::string& out, std::span<const double> values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out += ',';
    out += format_double(values[i]);
  }
  out += ']';
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

Vector read_array(const nlohmann::json& obj, const char* key, std::size_t expected) {
  if (!obj.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  const auto& arr = obj.at(key);
  if (!arr.is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
  if (arr.size() != expected) {
    throw ParseError(std::string("field '") + key + "' has " + std::to_string(arr.size()) +
                     " entries, expected " + std::to_string(expected));
  }
  Vector out(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    if (!arr[i].is_number()) {
      throw ParseError(std::string("field '") + key + "' entry " + std::to_string(i) +
                       " is not a number");
    }
    out[i] = arr[i].get<double>();
    if (!std::isfinite(out[i])) {
      throw ParseError(std::string("field '") + key + "' entry " + std::to_string(i) +
                       " is not finite");
    }
  }
  return out;
}

std::size_t read_count(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

std::string instance_to_json(const ProblemInstance& inst) {
  std::string out;
  out.reserve(32 * (inst.A.size() + 2 * inst.n + inst.d) + 128);
  out += "{\n  \"format_version\": 1,\n  \"n\": " + std::to_string(inst.n) +
         ",\n  \"d\": " + std::to_string(inst.d) + ",\n  \"A\": ";
  append_array(out, inst.A.data());
  out += ",\n  \"b\": ";
  append_array(out, inst.b);
  out += ",\n  \"c\": ";
  append_array(out, inst.c);
  out += ",\n  \"w\": ";
  append_array(out, inst.w);
  if (!inst.x_star.empty()) {
    out += ",\n  \"x_star\": ";
    append_array(out, inst.x_star);
  }
  out += "\n}\n";
  return out;
}

ProblemInstance instance_from_json(std::string_view text) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("line " + std::to_string(line_of_offset(text, e.byte)) + ": " +
                     e.what());
  }
  if (!obj.is_object()) throw ParseError("line 1: instance file must hold one object");

  const std::size_t version = read_count(obj, "format_version");
  if (version != 1) {
    throw ParseError("field 'format_version' is " + std::to_string(version) +
                     ", only 1 is supported");
  }
  ProblemInstance inst;
  inst.n = read_count(obj, "n");
  inst.d = read_count(obj, "d");
  if (inst.d < 1 || inst.n < inst.d) {
    throw ParseError("fields 'n'/'d': need n >= d >= 1, got n=" + std::to_string(inst.n) +
                     " d=" + std::to_string(inst.d));
  }
  inst.A = DenseMatrix::from_row_major(inst.n, inst.d, read_array(obj, "A", inst.n * inst.d));
  inst.b = read_array(obj, "b", inst.n);
  inst.c = read_array(obj, "c", inst.d);
  inst.w = read_array(obj, "w", inst.n);
  if (obj.contains("x_star")) inst.x_star = read_array(obj, "x_star", inst.d);
  for (std::size_t i = 0; i < inst.n; ++i) {
    if (!(inst.w[i] > 0.0)) {
      throw ParseError("field 'w' entry " + std::to_string(i) + " must be > 0");
    }
  }
  try {
    (void)qr_thin(inst.A);
  } catch (const RankDeficient& e) {
    throw ParseError(std::string("field 'A': ") + e.what());
  }
  return inst;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_instance(const ProblemInstance& inst, const std::filesystem::path& path) {
  write_file_atomic(path, instance_to_json(inst));
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open instance file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

}  // namespace levinv
