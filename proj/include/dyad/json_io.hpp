// json_io.hpp — serialization: Hamiltonian / state / report JSON schemas and
// the trajectory CSV formats used by the command-line tools.

#pragma once

#include "dyad/classical.hpp"
#include "dyad/dynamics.hpp"
#include "dyad/hamiltonian.hpp"
#include "dyad/reconstruction.hpp"
#include "dyad/state_recovery.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace dyad::io {

using nlohmann::json;

// {"alpha":[...], "beta":[...], "gamma":[[...],[...],[...]]} for the general
// form; the canonical form carries "gamma":[g1,g2,g3] instead.
json to_json(const GeneralHamiltonian& h);
json to_json(const CanonicalHamiltonian& h);
bool is_canonical_schema(const json& j);
CanonicalHamiltonian canonical_from_json(const json& j);
GeneralHamiltonian general_from_json(const json& j); // accepts either form

json to_json(const TwoQubitState& s);
TwoQubitState state_from_json(const json& j);

// Undetermined entries serialize as null, never as numbers.
json to_json(const EnvironmentEstimate& est);

json to_json(const ReconstructionReport& report);

json to_json(const ClassicalSystem& sys);
ClassicalSystem classical_system_from_json(const json& j);
json to_json(const ClassicalCanonical& c);
json to_json(const ClassicalReconstruction& r);

// Trajectory CSV: header t,u11,...,u33,v11,...,v33,w111,...,w333 with
// row-major index order and full double precision.
std::string trajectory_csv_header();
std::string trajectory_csv(const std::vector<MapSnapshot>& snapshots);
std::vector<MapSnapshot> parse_trajectory_csv(const std::string& text);

// Mean-value CSV: t,s1,s2,s3.
std::string means_csv(const std::vector<double>& times,
                      const std::vector<Vector3d>& means);

// Whole-file helpers; writes go through a temp file and rename.
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content);
void write_json_file(const std::filesystem::path& path, const json& j);
json load_json_file(const std::filesystem::path& path);
std::string load_text_file(const std::filesystem::path& path);

} // namespace dyad::io
