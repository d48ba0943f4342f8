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
#include "segeval/manifest.hpp"

#include "segeval/error.hpp"

#include <fstream>
#include <sstream>

namespace segeval {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(std::size_t line, const std::string &what) {
  throw Error(ErrorKind::InvalidManifest, "manifest line " + std::to_string(line) + ": " + what);
}

} // namespace

Role Role::parse(std::string_view text) {
  Role r;
  if (text == "reference") {
    return r;
  }
  if (text.starts_with("method:")) {
    r.kind = Kind::Method;
    r.name = std::string(text.substr(7));
    if (r.name.empty()) {
      throw Error(ErrorKind::InvalidManifest, "method role needs a name");
    }
    return r;
  }
  if (text.starts_with("rater:")) {
    const auto rest = text.substr(6);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == rest.size()) {
      throw Error(ErrorKind::InvalidManifest, "rater role must be rater:<id>:<session>");
    }
    r.kind = Kind::Rater;
    r.name = std::string(rest.substr(0, colon));
    r.session = std::string(rest.substr(colon + 1));
    return r;
  }
  throw Error(ErrorKind::InvalidManifest, "unknown role \"" + std::string(text) + "\"");
}

std::string Role::str() const {
  switch (kind) {
  case Kind::Reference: return "reference";
  case Kind::Method: return "method:" + name;
  case Kind::Rater: return "rater:" + name + ":" + session;
  }
  return {};
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

Manifest parse_manifest(std::string_view text, const std::filesystem::path &base_dir) {
  if (text.starts_with("\xEF\xBB\xBF")) {
    text.remove_prefix(3);
  }
  Manifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_csv_line(line);
    if (!header) {
      if (fields != std::vector<std::string>{"case_id", "role", "path"}) {
        bad(lineno, "header must be case_id,role,path");
      }
      header = true;
      continue;
    }
    if (fields.size() != 3) {
      bad(lineno, "expected 3 fields, found " + std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[2].empty()) {
      bad(lineno, "case_id and path must be non-empty");
    }
    ManifestRow row;
    row.case_id = fields[0];
    try {
      row.role = Role::parse(fields[1]);
    } catch (const Error &e) {
      bad(lineno, e.what());
    }
    const std::filesystem::path p(fields[2]);
    row.path = p.is_absolute() ? p : base_dir / p;
    row.line = lineno;
    m.rows.push_back(std::move(row));
  }
  if (m.rows.empty()) {
    throw Error(ErrorKind::InvalidManifest, "manifest has no rows");
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoFailure, "cannot open manifest " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

} // namespace segeval
