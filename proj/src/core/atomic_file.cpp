#include "cirpeak/core/atomic_file.hpp"

#include <atomic>
#include <fstream>
#include <system_error>

#include <unistd.h>

#include "cirpeak/errors.hpp"

namespace cirpeak::core {
namespace fs = std::filesystem;
namespace {

fs::path temp_sibling(const fs::path& path) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  return tmp;
}

void write_plain(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = temp_sibling(path);
  try {
    write_plain(tmp, content);
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

StagedWrites::~StagedWrites() {
  std::error_code ec;
  for (const auto& [tmp, dest] : staged_) fs::remove(tmp, ec);
}

void StagedWrites::add(fs::path path, std::string content) {
  pending_.emplace_back(std::move(path), std::move(content));
}

void StagedWrites::commit() {
  for (const auto& [dest, content] : pending_) {
    fs::path tmp = temp_sibling(dest);
    staged_.emplace_back(tmp, dest);
    write_plain(tmp, content);
  }
  for (const auto& [tmp, dest] : staged_) fs::rename(tmp, dest);
  staged_.clear();
  pending_.clear();
}

}  // namespace cirpeak::core
