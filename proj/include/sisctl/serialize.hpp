#pragma once

// JSON mapping of the parameter records. Field names match the
// configuration file schema documented in configs/README.md.

#include <string>
#include <string_view>

#include <json.hpp>

#include "sisctl/fields.hpp"
#include "sisctl/model.hpp"
#include "sisctl/pia.hpp"
#include "sisctl/sde_mc.hpp"

namespace sisctl {

using nlohmann::json;

void to_json(json& j, const ModelParams& p);
void from_json(const json& j, ModelParams& p);
void to_json(json& j, const CostParams& k);
void from_json(const json& j, CostParams& k);
void to_json(json& j, const Grid& g);
void from_json(const json& j, Grid& g);
void to_json(json& j, const McConfig& c);
void from_json(const json& j, McConfig& c);
// Covers the scalar PIA settings only; the Monte-Carlo block and the fixed
// control are serialized separately.
void to_json(json& j, const PiaConfig& c);
void from_json(const json& j, PiaConfig& c);

// git-style content hash: SHA-1 of "blob <size>\0<text>", hex encoded.
std::string content_hash(std::string_view text);

// Shortest round-trip decimal form, used for file names and labels.
std::string format_number(double v);

}  // namespace sisctl
