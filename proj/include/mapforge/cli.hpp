// Copyright 2026 The Mapforge Authors
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

#ifndef MAPFORGE__CLI_HPP_
#define MAPFORGE__CLI_HPP_

#include <ostream>
#include <string_view>

namespace mapforge
{

inline constexpr std::string_view kVersion = MAPFORGE_VERSION_STRING;

namespace cli
{

/// Entry point of the `mapforge` tool. Returns the process exit code: 0 on
/// success, non-zero after reporting an error to `err`.
int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

}  // namespace cli
}  // namespace mapforge

#endif  // MAPFORGE__CLI_HPP_
