#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "lcefem/spaces.hpp"

namespace lce {

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written file.  Throws std::runtime_error on I/O
/// failure; the temporary is removed.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer);

/// Plain-text state snapshot tagged with a caller-chosen key (for instance
/// the serialized material and solver settings) so stale caches are ignored.
void save_state(const std::filesystem::path& path, const FieldState& s, const std::string& key);

/// Returns nothing when the file is missing or was written under another key.
/// Throws std::runtime_error on a malformed file.
std::optional<FieldState> load_state(const std::filesystem::path& path, const std::string& key);

}  // namespace lce
