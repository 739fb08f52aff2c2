// Copyright 2026 The gentac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gentac::cli {

/// Runs one subcommand. Returns 0 on success, 2 on a usage error and 1 on a
/// runtime failure (after printing a one-line diagnostic to `err`).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

/// Git blob id of `bytes`: SHA-1 over "blob <size>\0" + bytes, lower-case hex.
std::string git_blob_hash(const std::string& bytes);

}  // namespace gentac::cli
