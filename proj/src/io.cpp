#include "mvp/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "mvp/error.hpp"

namespace mvp {

namespace fs = std::filesystem;

namespace {

fs::path temp_sibling(const fs::path& path) {
  fs::path tmp = path;
  tmp += ".tmp";
  return tmp;
}

void write_plain(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& contents) {
  const fs::path tmp = temp_sibling(path);
  try {
    write_plain(tmp, contents);
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

void OutputSet::commit() const {
  fs::create_directories(dir_);
  std::vector<fs::path> staged;
  try {
    for (const auto& [name, contents] : files_) {
      const fs::path tmp = temp_sibling(dir_ / name);
      staged.push_back(tmp);
      write_plain(tmp, contents);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& tmp : staged) fs::remove(tmp, ec);
    throw;
  }
  for (std::size_t i = 0; i < files_.size(); ++i) fs::rename(staged[i], dir_ / files_[i].first);
}

std::string format_full(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_short(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_full(*value) : std::string();
}

}  // namespace mvp
