#pragma once

#include <spdlog/logger.h>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

namespace frontier_sis {

/// Library logger. Writes to stderr; level from FRONTIER_SIS_LOG
/// (trace, debug, info, warn, error, off; default warn).
spdlog::logger& log();

/// Writes `content` to a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace frontier_sis
