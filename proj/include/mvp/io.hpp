#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mvp {

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Collects several output files and publishes them together. Nothing touches
/// the target directory until commit(); each file is then written to a temp
/// name and all temps are renamed once every write has succeeded.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string contents) {
    files_.emplace_back(name, std::move(contents));
  }
  void commit() const;

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

/// Shortest decimal form that parses back to the same double.
std::string format_full(double value);

/// Six significant digits, for terminal output.
std::string format_short(double value);

/// Empty string for an absent value, full precision otherwise.
std::string format_optional(const std::optional<double>& value);

}  // namespace mvp
