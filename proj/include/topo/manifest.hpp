#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace topo {

/// The frozen conventions as a JSON document, with "hash" holding the SHA-256
/// of the document's compact serialization without that field.
nlohmann::json manifest();
std::string manifest_hash();

std::string sha256_hex(std::string_view data);

}  // namespace topo
