#pragma once

// State documents are JSON:
//   {"kind": "pure" | "density", "n_modes": 1|2, "cutoff": N,
//    "data": [[re, im], ...]}
// with density entries in row-major order. Doubles are written in shortest
// round-trip form, so write/read is bit-exact.
//
// CSVs always carry a header row, use '.' as decimal separator and end every
// line with '\n'.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "catforge/analysis.hpp"
#include "catforge/fock.hpp"
#include "catforge/state_generator.hpp"
#include "catforge/temporal_modes.hpp"
#include "catforge/tomography.hpp"

namespace catforge {

using Json = nlohmann::ordered_json;

Json to_json(const PureState& psi);
Json to_json(const DensityMatrix& rho);
Json to_json(const GenerationResult& result);
Json to_json(const WignerGrid& grid);

using StateDocument = std::variant<PureState, DensityMatrix>;

/// Accepts both state kinds and GenerationResult documents (which embed a
/// density matrix). Throws InvalidArgument on schema errors.
StateDocument state_from_json(const Json& doc);
PureState pure_state_from_json(const Json& doc);
DensityMatrix density_matrix_from_json(const Json& doc);

/// Density matrix of either kind of document.
DensityMatrix as_density(const StateDocument& doc);

std::string dump(const Json& doc);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

Json read_json(const std::filesystem::path& path);

/// x,p,W rows, x-major.
std::string wigner_csv(const WignerGrid& grid);
/// n,p rows.
std::string photon_distribution_csv(const std::vector<double>& p);
/// time_s,amplitude rows.
std::string mode_taps_csv(const ModeTaps& taps);
/// x,theta rows.
std::string quadrature_csv(const QuadratureRecord& record);
/// Sidecar with seed, source and sample count.
Json quadrature_metadata(const QuadratureRecord& record);
/// iteration,loglikelihood rows.
std::string likelihood_csv(const std::vector<double>& trace);

/// samples.csv -> samples.meta.json
std::filesystem::path quadrature_metadata_path(const std::filesystem::path& csv);

/// Parses a record CSV with header "x,theta"; seed/source come from the
/// sidecar when it exists. Throws InvalidArgument naming the offending line.
QuadratureRecord read_quadrature_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace catforge
