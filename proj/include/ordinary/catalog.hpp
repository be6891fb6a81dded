#pragma once

// Group catalog files: a YAML stream with one document per GroupEntry.
// See docs/catalog-format.md for the grammar.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ordinary/groups.hpp"

namespace ordinary {

std::vector<GroupEntry> parse_catalog(std::string_view text);
std::vector<GroupEntry> load_catalog(const std::filesystem::path& path);

std::string serialize_entry(const GroupEntry& entry);
std::string serialize_catalog(const std::vector<GroupEntry>& entries);

/// nullptr when no entry has this id.
const GroupEntry* find_entry(const std::vector<GroupEntry>& entries, std::string_view id) noexcept;

/// Same id, kind, flag, order, metadata and exact representatives.
bool same_entry(const GroupEntry& a, const GroupEntry& b);

}  // namespace ordinary
