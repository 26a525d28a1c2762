// Copyright 2026 The dsmc Authors
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

// Number formatting shared by messages and the text format.

#include <string>

namespace dsmc::detail {

/// Shortest decimal that parses back to exactly `x`.
std::string format_exact(double x);

/// Compact human form with 10 significant digits ("1.1", "0.3").
std::string format_short(double x);

}  // namespace dsmc::detail
