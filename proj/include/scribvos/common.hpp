// This file is part of the scribvos project, a scribble-initialized video
// object segmentation toolkit.
//
// Copyright 2026 the scribvos authors
//
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

namespace scribvos {

/// Base class for all toolkit errors; `kind()` is the stable machine-parsable
/// error class printed by the CLI on failure.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), m_kind(std::move(kind)) {}
    const std::string& kind() const { return m_kind; }
private:
    std::string m_kind;
};

#define SCRIBVOS_DEFINE_ERROR(name) \
    class name : public Error { \
    public: \
        explicit name(const std::string& msg) : Error(#name, msg) {} \
    }

SCRIBVOS_DEFINE_ERROR(NotFound);
SCRIBVOS_DEFINE_ERROR(MalformedData);
SCRIBVOS_DEFINE_ERROR(InvalidInput);
SCRIBVOS_DEFINE_ERROR(EmptyMask);
SCRIBVOS_DEFINE_ERROR(NonFiniteLoss);
SCRIBVOS_DEFINE_ERROR(IOError);
SCRIBVOS_DEFINE_ERROR(IncompleteResults);
SCRIBVOS_DEFINE_ERROR(InvalidSpec);

#undef SCRIBVOS_DEFINE_ERROR

/// Probabilities are kept strictly inside [kProbEps, 1 - kProbEps] wherever
/// they feed logarithms, odds, or the (0,1) map contract.
inline constexpr double kProbEps = 1e-7;

} // namespace scribvos
