#pragma once

#include <json.hpp>
#include <string>

#include "wsrm/baselines.hpp"
#include "wsrm/network.hpp"
#include "wsrm/sca.hpp"

namespace wsrm::io {

using json = nlohmann::json;

/// Complex numbers are [re, im] pairs. Beams: one array of pairs per user.
json beams_to_json(const BeamformerSet& beams);
BeamformerSet beams_from_json(const json& j);

/// {"num_bs", "num_users", "num_antennas", "h": [[[re, im], ...], ...]}
/// with h ordered b * num_users + k.
json channels_to_json(const ChannelSet& channels);
ChannelSet channels_from_json(const json& j);

/// Network without power budgets: {"num_bs", "num_antennas", "num_users",
/// "noise_var", "weights", "assignment"}. Missing weights default to 1 and a
/// missing assignment to contiguous user blocks.
json network_to_json(const NetworkConfig& config);
NetworkConfig network_from_json(const json& j, const std::string& where = "network");

/// Shared result schema of every algorithm:
/// {"algorithm", "converged", "iterations", "wsr", "trace", "kkt_residual", "beams"}.
/// kkt_residual is null when not evaluated.
json result_to_json(const std::string& algorithm, const sca::ScaResult& r);
json result_to_json(const std::string& algorithm, const baselines::WmmseResult& r);
json result_to_json(const std::string& algorithm, const BeamformerSet& beams, double wsr);

/// Writes to a sibling temporary file and renames it over path.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Field access that names the offending field in InvalidArgument messages.
const json& require(const json& obj, const std::string& key, const std::string& where);
double require_number(const json& obj, const std::string& key, const std::string& where);
int require_int(const json& obj, const std::string& key, const std::string& where);
std::string require_string(const json& obj, const std::string& key, const std::string& where);
std::vector<double> require_numbers(const json& obj, const std::string& key, const std::string& where);

}  // namespace wsrm::io
