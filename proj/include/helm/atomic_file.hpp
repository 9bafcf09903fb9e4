#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace helm {

/// Stages files next to their destinations and renames them into place on
/// commit(). Staged files that were never committed are removed.
class AtomicWriteSet {
public:
  AtomicWriteSet() = default;
  AtomicWriteSet(const AtomicWriteSet&) = delete;
  AtomicWriteSet& operator=(const AtomicWriteSet&) = delete;
  ~AtomicWriteSet();

  void stage(const std::filesystem::path& target, const std::string& content);
  void commit();

private:
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_; // temp, target
};

void write_file_atomic(const std::filesystem::path& target, const std::string& content);

} // namespace helm
