#include "sphkh/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sphkh/error.hpp"

namespace sphkh {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

bool is_json(const fs::path& path) { return path.extension() == ".json"; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct CsvTable {
  std::optional<int> declared_dim;
  std::vector<std::vector<double>> rows;
  std::vector<int> lines;
};

// Numeric rows; a leading `# d=<k>` comment declares the dimension, other
// comments and a single non-numeric header row are skipped.
CsvTable read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  CsvTable t;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const auto pos = s.find("d=");
      if (pos != std::string::npos) {
        try {
          t.declared_dim = std::stoi(s.substr(pos + 2));
        } catch (const std::exception&) {
          throw InputError(path.string() + ":" + std::to_string(lineno) + ": malformed dimension header");
        }
      }
      continue;
    }
    std::vector<double> row;
    std::stringstream cells(s);
    std::string cell;
    bool numeric = true;
    while (std::getline(cells, cell, ',')) {
      const std::string c = trim(cell);
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size() || errno == ERANGE) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (t.rows.empty() && !header_seen) {
        header_seen = true;
        continue;
      }
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": non-numeric value");
    }
    if (!t.rows.empty() && row.size() != t.rows.front().size()) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(t.rows.front().size()) + " columns, found " + std::to_string(row.size()));
    }
    t.rows.push_back(std::move(row));
    t.lines.push_back(lineno);
  }
  if (t.rows.empty()) throw InputError(path.string() + ": no data rows");
  return t;
}

Json parse_json(const fs::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

SphereDim resolve_dim(int from_data, std::optional<int> declared, std::optional<SphereDim> expected,
                      const fs::path& path) {
  if (declared && *declared != from_data) {
    throw InputError(path.string() + ": header declares d=" + std::to_string(*declared) + " but rows have " +
                     std::to_string(from_data + 1) + " coordinates");
  }
  if (from_data < 2) throw InputError(path.string() + ": points need at least 3 coordinates");
  if (expected && expected->value() != from_data) {
    throw InputError(path.string() + ": expected d=" + std::to_string(expected->value()) + ", file has d=" +
                     std::to_string(from_data));
  }
  return SphereDim(from_data);
}

SpherePoint checked_point(std::vector<double> x, const char* kind, std::size_t index, const fs::path& path,
                          std::optional<int> line = {}) {
  try {
    return SpherePoint::from_unit(std::move(x), kUnitTolerance);
  } catch (const std::invalid_argument& e) {
    std::string where = path.string();
    if (line) where += ":" + std::to_string(*line);
    throw InputError(where + ": " + kind + " " + std::to_string(index) + ": " + e.what());
  }
}

std::vector<double> json_vector(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw InputError(what + " must be an array of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

Json coords_json(std::span<const double> c) {
  Json a = Json::array();
  for (double x : c) a.push_back(x);
  return a;
}

void write_csv_points(std::ostream& out, const std::vector<SpherePoint>& pts, const std::vector<double>* weights) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = pts[i].coords();
    for (std::size_t k = 0; k < c.size(); ++k) out << (k ? "," : "") << format_double(c[k]);
    if (weights) out << "," << format_double((*weights)[i]);
    out << "\n";
  }
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json exponent_json(double p) { return std::isinf(p) ? Json("inf") : Json(p); }

}  // namespace

std::string file_digest(const fs::path& path) {
  const std::string data = read_file(path);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scattering read_points(const fs::path& path, std::optional<SphereDim> expected) {
  std::vector<SpherePoint> pts;
  if (is_json(path)) {
    const Json j = parse_json(path);
    if (!j.contains("points")) throw InputError(path.string() + ": missing \"points\"");
    std::optional<int> declared;
    if (j.contains("d")) declared = j["d"].get<int>();
    const auto& arr = j["points"];
    if (!arr.is_array() || arr.empty()) throw InputError(path.string() + ": \"points\" must be a nonempty array");
    const int cols = static_cast<int>(arr[0].size());
    const SphereDim dim = resolve_dim(cols - 1, declared, expected, path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      auto x = json_vector(arr[i], "point " + std::to_string(i));
      if (static_cast<int>(x.size()) != cols) throw InputError(path.string() + ": point " + std::to_string(i) + " has wrong length");
      pts.push_back(checked_point(std::move(x), "point", i, path));
    }
    try {
      return Scattering(dim, std::move(pts), path.filename().string());
    } catch (const std::invalid_argument& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  }
  CsvTable t = read_csv(path);
  const SphereDim dim = resolve_dim(static_cast<int>(t.rows[0].size()) - 1, t.declared_dim, expected, path);
  for (std::size_t i = 0; i < t.rows.size(); ++i) pts.push_back(checked_point(std::move(t.rows[i]), "point", i, path, t.lines[i]));
  try {
    return Scattering(dim, std::move(pts), path.filename().string());
  } catch (const std::invalid_argument& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_points(const fs::path& path, const Scattering& points) {
  auto out = open_out(path);
  if (is_json(path)) {
    Json j;
    j["d"] = points.dim().value();
    j["points"] = Json::array();
    for (const auto& p : points.points()) j["points"].push_back(coords_json(p.coords()));
    out << j.dump(2) << "\n";
    return;
  }
  out << "# d=" << points.dim().value() << "\n";
  write_csv_points(out, points.points(), nullptr);
}

DiscreteSignedMeasure read_measure(const fs::path& path, std::optional<SphereDim> expected) {
  std::vector<SpherePoint> pts;
  std::vector<double> w;
  if (is_json(path)) {
    const Json j = parse_json(path);
    if (!j.contains("points") || !j.contains("weights")) {
      throw InputError(path.string() + ": measure needs \"points\" and \"weights\"");
    }
    std::optional<int> declared;
    if (j.contains("d")) declared = j["d"].get<int>();
    const auto& arr = j["points"];
    if (!arr.is_array() || arr.empty()) throw InputError(path.string() + ": \"points\" must be a nonempty array");
    w = json_vector(j["weights"], "weights");
    if (w.size() != arr.size()) throw InputError(path.string() + ": points and weights differ in length");
    const int cols = static_cast<int>(arr[0].size());
    const SphereDim dim = resolve_dim(cols - 1, declared, expected, path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      auto x = json_vector(arr[i], "atom " + std::to_string(i));
      if (static_cast<int>(x.size()) != cols) throw InputError(path.string() + ": atom " + std::to_string(i) + " has wrong length");
      pts.push_back(checked_point(std::move(x), "atom", i, path));
    }
    return {dim, std::move(pts), std::move(w), path.filename().string()};
  }
  CsvTable t = read_csv(path);
  const int cols = static_cast<int>(t.rows[0].size());
  const SphereDim dim = resolve_dim(cols - 2, t.declared_dim, expected, path);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    auto& row = t.rows[i];
    w.push_back(row.back());
    row.pop_back();
    pts.push_back(checked_point(std::move(row), "atom", i, path, t.lines[i]));
  }
  return {dim, std::move(pts), std::move(w), path.filename().string()};
}

void write_measure(const fs::path& path, const DiscreteSignedMeasure& sigma) {
  auto out = open_out(path);
  if (is_json(path)) {
    Json j;
    j["d"] = sigma.dim().value();
    j["points"] = Json::array();
    for (const auto& p : sigma.points()) j["points"].push_back(coords_json(p.coords()));
    j["weights"] = sigma.weights();
    out << j.dump(2) << "\n";
    return;
  }
  out << "# d=" << sigma.dim().value() << "\n";
  write_csv_points(out, sigma.points(), &sigma.weights());
}

HarmonicField read_field(const fs::path& path, std::optional<SphereDim> expected) {
  const Json j = parse_json(path);
  if (!j.contains("charges") || !j["charges"].is_array() || j["charges"].empty()) {
    throw InputError(path.string() + ": field needs a nonempty \"charges\" array");
  }
  std::vector<PointCharge> charges;
  for (std::size_t i = 0; i < j["charges"].size(); ++i) {
    const auto& c = j["charges"][i];
    if (!c.contains("location") || !c.contains("strength") || !c["strength"].is_number()) {
      throw InputError(path.string() + ": charge " + std::to_string(i) + " needs \"location\" and \"strength\"");
    }
    charges.push_back({json_vector(c["location"], "charge " + std::to_string(i) + " location"), c["strength"].get<double>()});
  }
  const int cols = static_cast<int>(charges[0].location.size());
  const SphereDim dim = resolve_dim(cols - 1, {}, expected, path);
  try {
    return make_field(dim, std::move(charges));
  } catch (const std::invalid_argument& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_field(const fs::path& path, const HarmonicField& f) {
  Json j;
  j["charges"] = Json::array();
  for (const auto& q : f.charges()) j["charges"].push_back({{"location", q.location}, {"strength", q.strength}});
  write_json(path, j);
}

void write_expansion(const fs::path& path, const FieldExpansion& e) {
  auto out = open_out(path);
  out << "charge_index,l,coefficient\n";
  for (std::size_t j = 0; j < e.pieces.size(); ++j) {
    for (std::size_t l = 0; l < e.pieces[j].coeffs.size(); ++l) {
      out << j << "," << l << "," << format_double(e.pieces[j].coeffs[l]) << "\n";
    }
  }
}

void write_profile(const fs::path& path, const ShellProfile& profile) {
  auto out = open_out(path);
  out << "node_index,value\n";
  for (std::size_t i = 0; i < profile.size(); ++i) out << i << "," << format_double(profile[i]) << "\n";
}

Json to_json(const SpherePoint& p) { return coords_json(p.coords()); }

Json to_json(const SpherePartition& partition) {
  Json j;
  j["d"] = partition.dim().value();
  j["n"] = partition.size();
  j["zones"] = partition.zone_count();
  j["partition_norm"] = partition_norm(partition);
  j["regions"] = Json::array();
  for (const auto& r : partition.regions()) {
    Json reg;
    reg["area"] = r.area;
    reg["diameter"] = r.diameter;
    reg["center"] = to_json(r.center);
    reg["representative"] = r.representative ? to_json(*r.representative) : Json(nullptr);
    j["regions"].push_back(std::move(reg));
  }
  return j;
}

Json to_json(const MeshNormEstimate& m) {
  return {{"value", m.value}, {"resolution_error", m.resolution_error}, {"lower", m.lower()}, {"upper", m.upper()}};
}

Json to_json(const IdentityReport& r) {
  return {{"lhs", r.lhs},
          {"rhs", r.rhs},
          {"residual", r.residual},
          {"relative", r.relative},
          {"truncation", r.truncation},
          {"truncation_tail", r.truncation_tail},
          {"quadrature_degree", r.quadrature_degree},
          {"quadrature_nodes", r.quadrature_nodes}};
}

Json to_json(const BoundReport& r) {
  return {{"lhs", r.lhs},
          {"rhs", r.rhs},
          {"slack", r.slack},
          {"rhs_sharp", r.rhs_sharp},
          {"slack_sharp", r.slack_sharp},
          {"p", exponent_json(r.p)},
          {"p_conjugate", exponent_json(r.p_conjugate)},
          {"d_norm", r.d_norm},
          {"u_norm", r.u_norm},
          {"prefactor", r.prefactor},
          {"prefactor_sharp", r.prefactor_sharp},
          {"surrogate_budget", r.surrogate_budget},
          {"truncation", r.truncation}};
}

Json to_json(const Theorem4Report& r) {
  Json j;
  j["measured_sup"] = r.measured_sup;
  j["bound"] = r.bound;
  j["partition_norm"] = r.partition_norm;
  j["mu_norm"] = r.mu_norm;
  j["r"] = r.r;
  j["n"] = r.n;
  j["shell_nodes"] = r.shell_nodes;
  j["mesh_norm"] = r.mesh_norm ? to_json(*r.mesh_norm) : Json(nullptr);
  j["epsilon"] = optional_number(r.epsilon);
  j["gate"] = optional_number(r.gate);
  j["partition_ratio"] = optional_number(r.partition_ratio);
  j["r_admissible_upper"] = optional_number(r.r_admissible_upper);
  j["r0"] = optional_number(r.r0);
  j["reduced_size"] = r.reduced_size ? Json(*r.reduced_size) : Json(nullptr);
  j["reduction_constant"] = optional_number(r.reduction_constant);
  j["radii"] = Json::array();
  for (const auto& c : r.radii) j["radii"].push_back({{"r", c.r}, {"measured_sup", c.measured_sup}, {"bound", c.bound}});
  j["diagnosis"] = r.diagnosis;
  return j;
}

Json to_json(const ScalingStudy& s) {
  Json j;
  j["sup_exponent"] = s.sup_exponent;
  j["partition_exponent"] = s.partition_exponent;
  j["rows"] = Json::array();
  for (const auto& row : s.rows) {
    j["rows"].push_back({{"n", row.n},
                         {"mesh_norm", to_json(row.mesh_norm)},
                         {"partition_norm", row.partition_norm},
                         {"measured_sup", row.measured_sup},
                         {"bound", row.bound}});
  }
  return j;
}

void write_scaling_table(const fs::path& path, const ScalingStudy& s) {
  auto out = open_out(path);
  out << "n,mesh_norm,mesh_lower,mesh_upper,partition_norm,measured_sup,bound\n";
  for (const auto& r : s.rows) {
    out << r.n << "," << format_double(r.mesh_norm.value) << "," << format_double(r.mesh_norm.lower()) << ","
        << format_double(r.mesh_norm.upper()) << "," << format_double(r.partition_norm) << ","
        << format_double(r.measured_sup) << "," << format_double(r.bound) << "\n";
  }
}

void write_json(const fs::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace sphkh
