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

#include "orbitcad/server/segment_store.hpp"

#include "orbitcad/session/wire.hpp"

#include <zlib.h>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>

namespace orbitcad::server {

namespace fs = std::filesystem;
using session::OpId;
using session::OpList;

namespace {

constexpr char kMagic[4] = {'O', 'C', 'S', 'L'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kLive = 0;
constexpr std::uint32_t kCompacted = 1;
constexpr std::size_t kHeaderSize = 28;

template <class T>
void put(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

template <class T>
bool get(const std::string& in, std::size_t& pos, T& v) {
  if (in.size() - pos < sizeof(T)) return false;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return true;
}

std::string header(std::uint32_t kind, OpId first, OpId covers) {
  std::string h(kMagic, 4);
  put(h, kVersion);
  put(h, kind);
  put(h, static_cast<std::uint64_t>(first));
  put(h, static_cast<std::uint64_t>(covers));
  return h;
}

std::string record(const session::SessionOp& op) {
  const std::string payload = session::encode_op(op);
  std::string r;
  r.reserve(payload.size() + 8);
  put(r, static_cast<std::uint32_t>(payload.size()));
  r += payload;
  put(r, crc32(std::as_bytes(std::span(payload.data(), payload.size()))));
  return r;
}

void write_all(int fd, const std::string& data, const fs::path& path) {
  std::size_t done = 0;
  while (done < data.size()) {
    ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error("io_error", "write to " + path.string() + " failed: " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

struct Segment {
  std::uint32_t kind = kLive;
  OpId first = 0;
  OpId covers = 0;
  OpList ops;
  std::size_t discarded = 0;
  bool valid = false;
};

Segment read_segment(const fs::path& path) {
  Segment s;
  std::ifstream in(path, std::ios::binary);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < kHeaderSize || std::memcmp(data.data(), kMagic, 4) != 0) {
    s.discarded = data.size();
    return s;
  }
  std::size_t pos = 4;
  std::uint32_t version = 0;
  std::uint64_t first = 0, covers = 0;
  get(data, pos, version);
  get(data, pos, s.kind);
  get(data, pos, first);
  get(data, pos, covers);
  if (version != kVersion) {
    s.discarded = data.size();
    return s;
  }
  s.first = first;
  s.covers = covers;
  s.valid = true;
  while (pos < data.size()) {
    const std::size_t start = pos;
    std::uint32_t len = 0, crc = 0;
    if (!get(data, pos, len) || data.size() - pos < std::size_t{len} + 4) {
      s.discarded = data.size() - start;
      break;
    }
    std::string_view payload(data.data() + pos, len);
    pos += len;
    get(data, pos, crc);
    if (crc32(std::as_bytes(std::span(payload.data(), payload.size()))) != crc) {
      s.discarded = data.size() - start;
      break;
    }
    try {
      s.ops.push_back(session::decode_op(payload));
    } catch (const Error&) {
      s.discarded = data.size() - start;
      break;
    }
  }
  return s;
}

}  // namespace

std::uint32_t crc32(std::span<const std::byte> data) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  const auto* p = reinterpret_cast<const Bytef*>(data.data());
  std::size_t left = data.size();
  while (left > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    c = ::crc32(c, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

SegmentLog::SegmentLog(fs::path dir, std::string session_id, bool sync_each_append)
    : dir_(std::move(dir)), session_(std::move(session_id)), sync_each_(sync_each_append) {
  fs::create_directories(dir_);
}

SegmentLog::~SegmentLog() { close_live(); }

std::vector<fs::path> SegmentLog::files() const {
  std::map<OpId, fs::path> found;
  const std::string prefix = session_ + ".";
  for (const auto& e : fs::directory_iterator(dir_)) {
    const std::string name = e.path().filename().string();
    if (name.size() <= prefix.size() + 4 || name.compare(0, prefix.size(), prefix) != 0) continue;
    if (name.compare(name.size() - 4, 4, ".log") != 0) continue;
    const std::string mid = name.substr(prefix.size(), name.size() - prefix.size() - 4);
    if (mid.empty() || mid.find_first_not_of("0123456789") != std::string::npos) continue;
    found.emplace(std::stoull(mid), e.path());
  }
  std::vector<fs::path> out;
  for (auto& [k, p] : found) out.push_back(p);
  return out;
}

RecoveredLog SegmentLog::recover() const {
  RecoveredLog r;
  std::vector<Segment> live;
  for (const fs::path& p : files()) {
    Segment s = read_segment(p);
    r.discarded_bytes += s.discarded;
    if (!s.valid) continue;
    if (s.kind == kCompacted) {
      if (s.covers >= r.covers_through) {
        r.covers_through = s.covers;
        r.base = std::move(s.ops);
      }
    } else {
      live.push_back(std::move(s));
    }
  }
  OpId last = r.covers_through;
  for (Segment& s : live) {
    for (session::SessionOp& op : s.ops) {
      if (op.op_id <= last) continue;
      last = op.op_id;
      r.tail.push_back(std::move(op));
    }
  }
  return r;
}

void SegmentLog::open_live(OpId first_op) {
  live_path_ = dir_ / (session_ + "." + std::to_string(first_op) + ".log");
  fd_ = ::open(live_path_.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error("io_error", "cannot open " + live_path_.string() + ": " + std::strerror(errno));
  write_all(fd_, header(kLive, first_op, 0), live_path_);
}

void SegmentLog::close_live() {
  if (fd_ >= 0) {
    if (unsynced_ > 0) ::fsync(fd_);
    ::close(fd_);
    fd_ = -1;
  }
  unsynced_ = 0;
}

void SegmentLog::append(const session::SessionOp& op) {
  if (fd_ < 0) open_live(op.op_id);
  write_all(fd_, record(op), live_path_);
  if (sync_each_) {
    if (::fsync(fd_) != 0) throw Error("io_error", "fsync of " + live_path_.string() + " failed");
  } else {
    ++unsynced_;
  }
}

void SegmentLog::flush() {
  if (fd_ < 0 || unsynced_ == 0) return;
  if (::fsync(fd_) != 0) throw Error("io_error", "fsync of " + live_path_.string() + " failed");
  unsynced_ = 0;
}

void SegmentLog::compact(const OpList& squashed, OpId covers_through) {
  close_live();
  const fs::path base = dir_ / (session_ + ".0.log");
  const fs::path tmp = dir_ / (session_ + ".0.log.tmp");
  std::string data = header(kCompacted, 1, covers_through);
  for (const session::SessionOp& op : squashed) data += record(op);
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("io_error", "cannot open " + tmp.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, data, tmp);
  } catch (...) {
    ::close(fd);
    throw;
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    throw Error("io_error", "fsync of " + tmp.string() + " failed");
  }
  ::close(fd);
  fs::rename(tmp, base);
  for (const fs::path& p : files()) {
    if (p != base) fs::remove(p);
  }
  if (int dfd = ::open(dir_.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC); dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

std::size_t SegmentLog::record_count() const {
  std::size_t n = 0;
  for (const fs::path& p : files()) n += read_segment(p).ops.size();
  return n;
}

void SegmentLog::remove_all() {
  close_live();
  for (const fs::path& p : files()) fs::remove(p);
}

}  // namespace orbitcad::server
