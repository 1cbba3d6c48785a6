// Copyright 2026 The qmodel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QMODEL_IO_H_
#define QMODEL_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace qmodel {

/// Writes `content` to a sibling temporary file, then renames it over `path`.
/// Parent directories are created. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Decimal with 17 significant digits (%.17g); round-trips every double.
void append_double(std::string& out, double value);
std::string format_double(double value);

}  // namespace qmodel

#endif  // QMODEL_IO_H_
