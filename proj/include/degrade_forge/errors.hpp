// Copyright (c) the degrade-forge authors
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

#ifndef DEGRADE_FORGE_ERRORS_HPP_
#define DEGRADE_FORGE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace degrade_forge {

// Error kinds surfaced by the library. Everything else is a programming error.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class JobError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace degrade_forge

#endif  // DEGRADE_FORGE_ERRORS_HPP_
