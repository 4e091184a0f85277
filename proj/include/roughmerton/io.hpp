#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "roughmerton/distortion.hpp"
#include "roughmerton/kernels.hpp"
#include "roughmerton/markov_approx.hpp"
#include "roughmerton/models.hpp"
#include "roughmerton/riccati.hpp"
#include "roughmerton/roughness.hpp"

namespace roughmerton {

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

/// Git-style blob hash: sha1("blob <size>\0" + content), lowercase hex.
std::string content_hash(std::string_view content);

/// Writes the file in one go, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::string resolvent_csv(const ResolventCurve& curve);
std::string riccati_csv(const RiccatiSolution& solution);

/// Long format: path_id,t,V,S,wealth (wealth empty when absent).
std::string path_bundle_csv(const PathBundle& bundle);

/// Binary dump: "VMPB", u32 version, u64 n_paths, u64 n_steps, f64 dt,
/// u64 seed, then V, S and (if present) wealth as row-major f64 arrays of
/// n_paths x (n_steps + 1). Little-endian host layout.
void write_path_bundle_binary(const PathBundle& bundle, std::ostream& os);
PathBundle read_path_bundle_binary(std::istream& is);

std::string scaling_csv(const ScalingReport& report);
nlohmann::json scaling_summary(const ScalingReport& report);

std::string strategy_csv(const DistortionSolution& s);
std::string distortion_curves_csv(const DistortionSolution& s);
nlohmann::json condition_json(const ConditionReport& c);
nlohmann::json distortion_summary(const DistortionSolution& s);

std::string quantization_csv(const Quantization& q);
std::string convergence_csv(const ConvergenceTable& table);

}  // namespace roughmerton
