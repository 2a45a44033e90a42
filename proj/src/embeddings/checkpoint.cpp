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

#include "gce/embeddings/checkpoint.h"

#include <cstring>
#include <string_view>

#include "gce/core/binary_io.h"
#include "gce/error.h"

namespace gce {

namespace {

constexpr std::string_view kWhat = "checkpoint";

template <typename T>
void put(std::ostream& out, T v) { bin::put<T>(out, v); }
template <typename T>
T get(std::istream& in) { return bin::get<T, CheckpointError>(in, kWhat); }
void put_string(std::ostream& out, const std::string& s) { bin::put_string(out, s); }
std::string get_string(std::istream& in) { return bin::get_string<CheckpointError>(in, kWhat); }

}  // namespace

void write_checkpoint(std::ostream& out, const std::string& tag,
                      std::span<const Parameter* const> tensors) {
  out.write(kCheckpointMagic, 4);
  put<std::uint8_t>(out, kCheckpointVersion);
  put_string(out, tag);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const Parameter* p : tensors) {
    put_string(out, p->name);
    put<std::uint64_t>(out, p->value.rows());
    put<std::uint64_t>(out, p->value.cols());
    for (double v : p->value.values()) put<double>(out, v);
  }
  if (!out) throw CheckpointError("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw CheckpointError("checkpoint: bad magic, not a GCEC file");
  }
  const auto version = get<std::uint8_t>(in);
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint: format version " + std::to_string(version) +
                          ", expected " + std::to_string(kCheckpointVersion));
  }
  Checkpoint ck;
  ck.tag = get_string(in);
  const auto count = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = get_string(in);
    const auto rows = get<std::uint64_t>(in);
    const auto cols = get<std::uint64_t>(in);
    if (rows * cols > (std::uint64_t{1} << 32)) throw CheckpointError("checkpoint: tensor too large");
    std::vector<double> values(rows * cols);
    for (double& v : values) v = get<double>(in);
    ck.tensors.emplace_back(std::move(name), DenseMatrix(rows, cols, std::move(values)));
  }
  return ck;
}

}  // namespace gce
