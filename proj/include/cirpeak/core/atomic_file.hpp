#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace cirpeak::core {

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Collects outputs and publishes them together. Nothing is visible at the
/// destination paths until commit(); a destroyed, uncommitted batch leaves
/// no files behind.
class StagedWrites {
 public:
  StagedWrites() = default;
  StagedWrites(const StagedWrites&) = delete;
  StagedWrites& operator=(const StagedWrites&) = delete;
  ~StagedWrites();

  void add(std::filesystem::path path, std::string content);
  void commit();

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> pending_;
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;
};

}  // namespace cirpeak::core
