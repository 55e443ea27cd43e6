#ifndef RESLAB_IO_HPP
#define RESLAB_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "reslab/correlations.hpp"
#include "reslab/determinant.hpp"
#include "reslab/galerkin.hpp"
#include "reslab/mollifier.hpp"
#include "reslab/periodic_orbits.hpp"
#include "reslab/torus_map.hpp"

namespace reslab::io {

using nlohmann::json;

// --- map specs -------------------------------------------------------------
// {"A": [[..],[..]], "epsilon": r, "perturbation": [{"k":[..], "amp":[..],
//  "phase":[..]}, ...]}
json map_spec_to_json(const MapSpec& spec);
MapSpec map_spec_from_json(const json& j, int grid_resolution = 256);
MapSpec load_map_spec(const std::string& path, int grid_resolution = 256);

/// FNV-1a hash of the canonical JSON form, stamped into every output.
std::string map_spec_hash(const MapSpec& spec);

json hyperbolicity_to_json(const HyperbolicityReport& rep);

// --- tables and results ------------------------------------------------------
json gamma_to_json(const GammaTable& table);
GammaTable gamma_from_json(const json& j);
std::string gamma_to_csv(const GammaTable& table, const json& header);

json det_poly_to_json(const DetPoly& poly);
DetPoly det_poly_from_json(const json& j);
std::string det_zeros_to_csv(const std::vector<DetZero>& zeros, const json& header);

json spectrum_to_json(const SpectrumResult& s);
std::string srb_density_to_csv(const SpectrumResult& s, int grid, const json& header);

std::string scaling_to_csv(const ScalingResult& s, const json& header);
json scaling_to_json(const ScalingResult& s);

std::string series_to_csv(const CorrelationSeries& s, const json& header);
json pade_to_json(const PadePoles& p);

json report_to_json(const UnifiedReport& rep);
std::string report_to_markdown(const UnifiedReport& rep);

// --- helpers ----------------------------------------------------------------
/// "# key = value" comment lines for CSV files (sorted, deterministic).
std::string csv_header(const json& meta);
void write_file(const std::string& path, const std::string& content);
std::string dump(const json& j);

} // namespace reslab::io

#endif
