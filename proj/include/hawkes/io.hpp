#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hawkes/types.hpp"

namespace hawkes {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// Writes `<stem>.csv` (header t,d) and `<stem>.json` ({T, K}).
void write_sequence(const EventSequence& seq, const fs::path& stem);
EventSequence read_sequence(const fs::path& stem);

json params_to_json(const HawkesParams& p);
HawkesParams params_from_json(const json& j);
void write_params(const HawkesParams& p, const fs::path& path);
HawkesParams read_params(const fs::path& path);

json hyper_to_json(const Hyperparams& h);
/// Missing keys keep their defaults.
Hyperparams hyper_from_json(const json& j);

/// CSV child_index,parent_index with 1-based indices and 0 for immigrants.
void write_branching(const LatentState& latent, const fs::path& path);

json read_json(const fs::path& path);
void write_json(const json& j, const fs::path& path);

/// Round-trip-exact decimal form of a double.
std::string format_double(double x);

}  // namespace hawkes
