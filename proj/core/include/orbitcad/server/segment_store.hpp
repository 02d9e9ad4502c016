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

#include "orbitcad/session/op.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace orbitcad::server {

std::uint32_t crc32(std::span<const std::byte> data);

/// What recovery found on disk for one session.
struct RecoveredLog {
  /// Compacted base (op_ids 1..k), empty when never compacted.
  session::OpList base;
  /// Highest original op_id the base covers.
  session::OpId covers_through = 0;
  /// Appended ops after the base, in op_id order.
  session::OpList tail;
  /// Trailing bytes ignored because a record was torn or failed its checksum.
  std::size_t discarded_bytes = 0;
};

/// Append-only on-disk log of one session.
///
/// Files live in `dir` as `{session}.{first_op}.log`. Each starts with a
/// 28-byte header (magic "OCSL", version, kind, first op, covered-through op)
/// followed by records of u32 length, wire-encoded op, u32 CRC-32 of the
/// payload. Kind 1 marks the compacted base, stored as `{session}.0.log`.
/// Every `append` is one write(2) call, so an op returned from `append`
/// survives a crash of the process.
class SegmentLog {
 public:
  SegmentLog(std::filesystem::path dir, std::string session_id, bool sync_each_append = false);
  ~SegmentLog();
  SegmentLog(const SegmentLog&) = delete;
  SegmentLog& operator=(const SegmentLog&) = delete;

  RecoveredLog recover() const;

  /// Throws Error("io_error") on a failed write.
  void append(const session::SessionOp& op);
  /// fsync of the live segment; a no-op without unsynced appends.
  void flush();
  /// Writes `squashed` as the new base covering ops up to `covers_through`,
  /// starts a new live segment and deletes the segments the base replaces.
  void compact(const session::OpList& squashed, session::OpId covers_through);

  /// Valid records across all files (tests and diagnostics).
  std::size_t record_count() const;
  std::vector<std::filesystem::path> files() const;
  void remove_all();
  std::size_t unsynced() const { return unsynced_; }

 private:
  void open_live(session::OpId first_op);
  void close_live();

  std::filesystem::path dir_;
  std::string session_;
  bool sync_each_;
  int fd_ = -1;
  std::filesystem::path live_path_;
  std::size_t unsynced_ = 0;
};

}  // namespace orbitcad::server
