#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "uqbench/core/errors.h"
#include "uqbench/core/types.h"

namespace uqbench {

// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);
std::string read_file(const std::filesystem::path& path);

// One compact JSON document per line, LF-terminated.
template <typename T>
std::string to_jsonl(const std::vector<T>& records) {
  std::string out;
  for (const auto& r : records) {
    out += Json(r).dump();
    out.push_back('\n');
  }
  return out;
}

template <typename T>
std::vector<T> from_jsonl(const std::string& text, const std::string& origin) {
  std::vector<T> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      out.push_back(Json::parse(line).get<T>());
    } catch (const Json::exception& e) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParameterError& e) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<T>& records) {
  write_file_atomic(path, to_jsonl(records));
}

template <typename T>
std::vector<T> read_jsonl(const std::filesystem::path& path) {
  return from_jsonl<T>(read_file(path), path.string());
}

}  // namespace uqbench
