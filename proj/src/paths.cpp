#include "wolf/paths.hpp"

#include <cstdlib>

#include "wolf/errors.hpp"

#ifndef WOLFARENA_SOURCE_DATA_DIR
#define WOLFARENA_SOURCE_DATA_DIR ""
#endif

namespace wolf {

namespace {

bool looks_like_data_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  return std::filesystem::is_directory(dir / "en" / "prompts", ec);
}

std::filesystem::path exe_dir() {
  std::error_code ec;
  auto self = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (ec) return {};
  return self.parent_path();
}

}  // namespace

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("WOLFARENA_DATA"); env != nullptr && *env != '\0') {
    std::filesystem::path dir(env);
    if (looks_like_data_dir(dir)) return dir;
    throw DomainError("WOLFARENA_DATA does not point at a data directory: " +
                      dir.string());
  }

  if (auto exe = exe_dir(); !exe.empty()) {
    for (const auto& candidate : {exe / ".." / "data", exe / "data"}) {
      if (looks_like_data_dir(candidate))
        return std::filesystem::weakly_canonical(candidate);
    }
  }
  if (looks_like_data_dir("data")) return std::filesystem::absolute("data");

  const std::filesystem::path source_dir(WOLFARENA_SOURCE_DATA_DIR);
  if (!source_dir.empty() && looks_like_data_dir(source_dir)) return source_dir;

  throw DomainError(
      "no data directory found; set WOLFARENA_DATA or run next to a data/ tree");
}

std::filesystem::path language_dir(const std::string& pack) {
  return default_data_dir() / pack;
}

std::filesystem::path language_dir(const std::filesystem::path& data_dir,
                                   const std::string& pack) {
  return data_dir / pack;
}

}  // namespace wolf
