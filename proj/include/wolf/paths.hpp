#pragma once

#include <filesystem>

namespace wolf {

// Locates the data directory (prompt templates, persuasion banks, scripts).
// Order: $WOLFARENA_DATA if set, then <exe dir>/../data and ./data when
// they contain a language pack, finally the source-tree data directory the
// binary was built from. Throws DomainError when nothing qualifies.
std::filesystem::path default_data_dir();

// The language-pack subdirectory, e.g. default_data_dir()/"en".
std::filesystem::path language_dir(const std::string& pack);
std::filesystem::path language_dir(const std::filesystem::path& data_dir,
                                   const std::string& pack);

}  // namespace wolf
