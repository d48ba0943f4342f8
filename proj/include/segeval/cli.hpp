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
#ifndef SEGEVAL_CLI_HPP
#define SEGEVAL_CLI_HPP

#include "segeval/error.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace segeval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;

/// 3 for file, format and parse failures; 2 for everything else.
int exit_code_for(ErrorKind kind) noexcept;

/// Entry point behind the `segeval` executable. `args` excludes the program
/// name. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace segeval::cli

#endif
