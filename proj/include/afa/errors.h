// Copyright 2026 The AFA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef AFA_ERRORS_H_
#define AFA_ERRORS_H_

#include <stdexcept>
#include <string>

namespace afa {

// Raised when a numerical budget (quadrature panels, node counts, bisection
// brackets) is exhausted before the requested tolerance is met. Carries the
// tolerance that was actually achieved. Input validation failures use
// std::invalid_argument / std::domain_error instead.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved_tolerance)
      : std::runtime_error(what), achieved_tolerance_(achieved_tolerance) {}

  double achieved_tolerance() const { return achieved_tolerance_; }

 private:
  double achieved_tolerance_;
};

}  // namespace afa

#endif  // AFA_ERRORS_H_
