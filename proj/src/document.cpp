/*
 * Copyright (c) 2026 The catsplit Authors
 *
 * Licensed under the Apache License, Version 2.0;
 * You may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an 'AS IS' BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "catsplit/document.hpp"

#include <fstream>
#include <sstream>

#include "catsplit/error.hpp"

namespace catsplit {

Document read_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Document::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": malformed document: " + e.what());
  }
}

std::string dump_document(const Document& doc) { return doc.dump(2) + "\n"; }

void write_document(const Document& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << dump_document(doc);
  if (!out) throw IoError("write failed: " + path.string());
}

const Document& require_field(const Document& doc, const std::string& key,
                              const std::string& context) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ValidationError(context + ": missing field '" + key + "'");
  }
  return doc.at(key);
}

std::string require_string(const Document& doc, const std::string& key,
                           const std::string& context) {
  const auto& v = require_field(doc, key, context);
  if (!v.is_string()) throw ValidationError(context + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const Document& doc, const std::string& key,
                                           const std::string& context) {
  if (!doc.is_object() || !doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  if (!doc.at(key).is_string()) {
    throw ValidationError(context + ": field '" + key + "' must be a string");
  }
  return doc.at(key).get<std::string>();
}

std::vector<std::string> string_list(const Document& doc, const std::string& key,
                                     const std::string& context) {
  const auto& v = require_field(doc, key, context);
  if (!v.is_array()) throw ValidationError(context + ": field '" + key + "' must be an array");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& item : v) {
    if (!item.is_string()) {
      throw ValidationError(context + ": field '" + key + "' must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::filesystem::path resolve_relative(const std::filesystem::path& document_path,
                                       const std::string& stored) {
  const std::filesystem::path p(stored);
  if (p.is_absolute()) return p;
  return document_path.parent_path() / p;
}

}  // namespace catsplit
