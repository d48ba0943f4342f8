/*=========================================================================
 *
 *  Copyright The segeval Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *         http://www.apache.org/licenses/LICENSE-2.0.txt
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 *
 *=========================================================================*/
#ifndef SEGEVAL_MANIFEST_HPP
#define SEGEVAL_MANIFEST_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace segeval {

/// Role column of a manifest row: "reference", "method:<name>" or
/// "rater:<id>:<session>".
struct Role {
  enum class Kind { Reference, Method, Rater };
  Kind kind = Kind::Reference;
  std::string name;    // method name or rater id
  std::string session; // raters only

  static Role parse(std::string_view text);
  std::string str() const;
};

struct ManifestRow {
  std::string case_id;
  Role role;
  std::filesystem::path path; // resolved against the manifest directory
  std::size_t line = 0;
};

struct Manifest {
  std::vector<ManifestRow> rows;
};

/// CSV with header `case_id,role,path`. Double-quoted fields may contain
/// commas. Throws InvalidManifest.
Manifest parse_manifest(std::string_view text, const std::filesystem::path &base_dir);

/// Throws IoFailure when the file cannot be read.
Manifest read_manifest(const std::filesystem::path &path);

/// Splits one CSV line, honouring double quotes ("" escapes a quote).
std::vector<std::string> split_csv_line(std::string_view line);

} // namespace segeval

#endif
