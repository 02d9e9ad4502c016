// Copyright 2026 The OrbitCAD Authors
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

#include "orbitcad/scene/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace orbitcad {

/// Binary model container ("OCMF"). Layout documented in docs/model-format.md.
inline constexpr std::uint32_t kContainerVersion = 1;

std::vector<std::byte> serialize(const SceneModel& model);
/// Throws ParseError with the byte offset of the first bad field.
SceneModel deserialize(std::span<const std::byte> bytes);

}  // namespace orbitcad
