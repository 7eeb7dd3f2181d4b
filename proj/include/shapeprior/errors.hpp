// shapeprior/errors.hpp
//
// Copyright 2026 the shapeprior authors
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

#include <stdexcept>
#include <string>

namespace shapeprior {

#define SHAPEPRIOR_DEFINE_ERROR(Name)                          \
  class Name : public std::runtime_error {                     \
   public:                                                     \
    explicit Name(const std::string& msg)                      \
        : std::runtime_error(std::string(#Name) + ": " + msg) {} \
  }

SHAPEPRIOR_DEFINE_ERROR(DimensionMismatch);
SHAPEPRIOR_DEFINE_ERROR(InvalidShape);
SHAPEPRIOR_DEFINE_ERROR(InvalidProbability);
SHAPEPRIOR_DEFINE_ERROR(EmptyMask);
SHAPEPRIOR_DEFINE_ERROR(TooFewSamples);
SHAPEPRIOR_DEFINE_ERROR(InvalidSpec);
SHAPEPRIOR_DEFINE_ERROR(EmptyDataset);
SHAPEPRIOR_DEFINE_ERROR(UntrainedModel);
SHAPEPRIOR_DEFINE_ERROR(DegeneratePatch);
SHAPEPRIOR_DEFINE_ERROR(BadFileSize);
SHAPEPRIOR_DEFINE_ERROR(ValueOutOfRange);
SHAPEPRIOR_DEFINE_ERROR(NotSquare);
SHAPEPRIOR_DEFINE_ERROR(EmptyManifest);
SHAPEPRIOR_DEFINE_ERROR(ImageTooLarge);
SHAPEPRIOR_DEFINE_ERROR(SchemaError);
SHAPEPRIOR_DEFINE_ERROR(IoError);

#undef SHAPEPRIOR_DEFINE_ERROR

}  // namespace shapeprior
