/*
 * Copyright 2026 The GCE Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gce/numerics/autodiff.h"

namespace gce {

// Layout, all integers little-endian:
//   "GCEC" | u8 version | u32 tag length | tag bytes | u32 tensor count |
//   per tensor: u32 name length | name bytes | u64 rows | u64 cols |
//               rows*cols f64 values, row-major
inline constexpr char kCheckpointMagic[4] = {'G', 'C', 'E', 'C'};
inline constexpr std::uint8_t kCheckpointVersion = 1;

struct Checkpoint {
  std::string tag;
  std::vector<Parameter> tensors;
};

void write_checkpoint(std::ostream& out, const std::string& tag,
                      std::span<const Parameter* const> tensors);
// Throws CheckpointError on bad magic, version mismatch or truncation.
Checkpoint read_checkpoint(std::istream& in);

}  // namespace gce
