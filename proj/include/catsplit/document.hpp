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

#pragma once

// Structured text documents (JSON) used for taxonomies, sidecars, manifests,
// configs and reports. Keys are written in insertion order so that equal
// content always serializes to identical bytes.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace catsplit {

using Document = nlohmann::ordered_json;

Document read_document(const std::filesystem::path& path);
// Two-space indented, trailing newline.
void write_document(const Document& doc, const std::filesystem::path& path);
std::string dump_document(const Document& doc);

// Field accessors that raise ValidationError naming the offending key.
const Document& require_field(const Document& doc, const std::string& key,
                              const std::string& context);
std::string require_string(const Document& doc, const std::string& key,
                           const std::string& context);
std::optional<std::string> optional_string(const Document& doc, const std::string& key,
                                           const std::string& context);
std::vector<std::string> string_list(const Document& doc, const std::string& key,
                                     const std::string& context);

// Resolves a path stored in a document relative to the document's directory.
std::filesystem::path resolve_relative(const std::filesystem::path& document_path,
                                       const std::string& stored);

}  // namespace catsplit
