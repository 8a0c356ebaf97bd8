// Copyright 2026 The pfkit Authors.
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

#ifndef PFKIT_CLI_CLI_H_
#define PFKIT_CLI_CLI_H_

#include <string>
#include <vector>

namespace pfkit {

// Runs the pfkit command line. `args` excludes the program name. Returns
// 0 on success, 1 on validation or usage errors and 2 on I/O, endpoint or
// scorer failures.
int RunCli(const std::vector<std::string>& args);
int RunCli(int argc, const char* const* argv);

}  // namespace pfkit

#endif  // PFKIT_CLI_CLI_H_
