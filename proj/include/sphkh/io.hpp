#pragma once

// File formats: point sets and measures (CSV or JSON), charge fields (JSON),
// expansion and shell-profile dumps (CSV), partitions and reports (JSON).

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

#include "sphkh/discrepancy.hpp"
#include "sphkh/harmonic.hpp"
#include "sphkh/measures.hpp"
#include "sphkh/sphere_geom.hpp"

namespace sphkh {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Coordinates must lie within this distance of the unit sphere on input.
inline constexpr double kUnitTolerance = 1e-10;

/// %.17g, so every double survives a write/read cycle exactly.
std::string format_double(double x);

/// FNV-1a 64-bit hash of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

/// CSV (one point per line, optional `# d=<dim>` header) or JSON
/// {"d": int, "points": [[...], ...]}, chosen by the .json extension.
Scattering read_points(const std::filesystem::path& path, std::optional<SphereDim> expected = {});
void write_points(const std::filesystem::path& path, const Scattering& points);

/// CSV rows x_0,...,x_d,weight or JSON {"d", "points", "weights"}.
DiscreteSignedMeasure read_measure(const std::filesystem::path& path, std::optional<SphereDim> expected = {});
void write_measure(const std::filesystem::path& path, const DiscreteSignedMeasure& sigma);

/// JSON {"charges": [{"location": [...], "strength": w}, ...]}.
HarmonicField read_field(const std::filesystem::path& path, std::optional<SphereDim> expected = {});
void write_field(const std::filesystem::path& path, const HarmonicField& f);

/// CSV charge_index,l,coefficient
void write_expansion(const std::filesystem::path& path, const FieldExpansion& e);
/// CSV node_index,value
void write_profile(const std::filesystem::path& path, const ShellProfile& profile);

Json to_json(const SpherePoint& p);
Json to_json(const SpherePartition& partition);
Json to_json(const MeshNormEstimate& m);
Json to_json(const IdentityReport& r);
Json to_json(const BoundReport& r);
Json to_json(const Theorem4Report& r);
Json to_json(const ScalingStudy& s);

/// CSV n,mesh_norm,mesh_lower,mesh_upper,partition_norm,measured_sup,bound
void write_scaling_table(const std::filesystem::path& path, const ScalingStudy& s);

/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace sphkh
