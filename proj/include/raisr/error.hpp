// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace raisr {

// Values line up with the C API status codes and the CLI exit codes.
enum class ErrorKind {
  Usage = 1,    // invalid argument or configuration
  Io = 2,       // unreadable/unwritable file, corrupt bank, codec failure
  Numeric = 3,  // NaN/Inf in a numerical routine
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_usage(const std::string& what) { throw Error(ErrorKind::Usage, what); }
[[noreturn]] inline void fail_io(const std::string& what) { throw Error(ErrorKind::Io, what); }
[[noreturn]] inline void fail_numeric(const std::string& what) { throw Error(ErrorKind::Numeric, what); }

}  // namespace raisr
