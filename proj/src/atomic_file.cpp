#include "helm/atomic_file.hpp"

#include <fstream>
#include <system_error>

#include <unistd.h>

#include "helm/core.hpp"

namespace helm {

namespace fs = std::filesystem;

AtomicWriteSet::~AtomicWriteSet() {
  for (const auto& [tmp, target] : staged_) {
    std::error_code ec;
    fs::remove(tmp, ec);
  }
}

void AtomicWriteSet::stage(const fs::path& target, const std::string& content) {
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " + target.parent_path().string() + ": " +
                    ec.message());
    }
  }
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(staged_.size());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot write " + tmp.string());
    }
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  staged_.emplace_back(tmp, target);
}

void AtomicWriteSet::commit() {
  for (const auto& [tmp, target] : staged_) {
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
      throw IoError("cannot rename " + tmp.string() + " to " + target.string() + ": " +
                    ec.message());
    }
  }
  staged_.clear();
}

void write_file_atomic(const fs::path& target, const std::string& content) {
  AtomicWriteSet set;
  set.stage(target, content);
  set.commit();
}

} // namespace helm
