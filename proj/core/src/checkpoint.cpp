// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include "vostk/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace vostk {
namespace {

constexpr std::uint8_t kMagic[4] = {'T', 'V', 'C', 'K'};
constexpr std::uint8_t kVersion = 0x01;

using Kind = CheckpointError::Kind;

std::uint64_t element_count(const std::vector<std::uint32_t>& shape) {
  std::uint64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }
  void need(std::uint64_t n) const {
    if (n > remaining()) throw CheckpointError(Kind::kTruncated, "checkpoint truncated");
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

void ParamStore::add(std::string name, std::vector<std::uint32_t> shape, std::vector<float> data) {
  if (find(name) != nullptr) {
    throw CheckpointError(Kind::kDuplicateName, "duplicate parameter name '" + name + "'");
  }
  if (element_count(shape) != data.size()) {
    throw CheckpointError(Kind::kShapeMismatch,
                          "parameter '" + name + "': data length does not match shape");
  }
  if (name.size() > std::numeric_limits<std::uint16_t>::max() ||
      shape.size() > std::numeric_limits<std::uint8_t>::max()) {
    throw CheckpointError(Kind::kShapeMismatch, "parameter '" + name + "': name or rank too large");
  }
  entries_.push_back({std::move(name), std::move(shape), std::move(data)});
}

const ParamEntry* ParamStore::find(std::string_view name) const noexcept {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

ParamEntry* ParamStore::find(std::string_view name) noexcept {
  for (auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const ParamEntry& ParamStore::at(std::string_view name) const {
  if (const auto* e = find(name)) return *e;
  throw CheckpointError(Kind::kMissingEntry, "missing parameter '" + std::string(name) + "'");
}

std::vector<std::uint8_t> serialize(const ParamStore& store) {
  std::vector<std::uint8_t> out;
  Writer w(out);
  w.bytes(kMagic, sizeof(kMagic));
  w.u8(kVersion);
  w.u32(static_cast<std::uint32_t>(store.size()));
  for (const auto& e : store.entries()) {
    w.u16(static_cast<std::uint16_t>(e.name.size()));
    w.bytes(e.name.data(), e.name.size());
    w.u8(static_cast<std::uint8_t>(e.shape.size()));
    for (auto d : e.shape) w.u32(d);
    for (float v : e.data) w.f32(v);
  }
  return out;
}

ParamStore deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError(Kind::kBadMagic, "not a TVCK checkpoint (bad magic)");
  }
  Reader r(bytes.subspan(sizeof(kMagic)));
  const auto version = r.u8();
  if (version != kVersion) {
    throw CheckpointError(Kind::kUnsupportedVersion,
                          "unsupported TVCK version " + std::to_string(version));
  }
  ParamStore store;
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str(r.u16());
    const std::uint8_t ndim = r.u8();
    std::vector<std::uint32_t> shape(ndim);
    for (auto& d : shape) d = r.u32();
    const std::uint64_t n = element_count(shape);
    r.need(n * 4);
    std::vector<float> data(static_cast<std::size_t>(n));
    for (auto& v : data) v = r.f32();
    store.add(std::move(name), std::move(shape), std::move(data));
  }
  if (r.remaining() != 0) {
    throw CheckpointError(Kind::kTrailingBytes, "unexpected bytes after the last entry");
  }
  return store;
}

void save(const ParamStore& store, const std::filesystem::path& path) {
  const auto bytes = serialize(store);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(Kind::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError(Kind::kIo, "write failed: " + path.string());
}

ParamStore load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(Kind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

TransplantResult transplant(const ParamStore& target, const ParamStore& source,
                            std::string_view prefix, bool strict) {
  TransplantResult result{target, {}};
  auto& report = result.report;
  for (const auto& entry : target.entries()) {
    if (!entry.name.starts_with(prefix)) {
      report.skipped_prefix.push_back(entry.name);
      continue;
    }
    const ParamEntry* src = source.find(entry.name);
    if (src == nullptr) {
      report.skipped_missing.push_back(entry.name);
      continue;
    }
    if (src->shape != entry.shape) {
      if (strict) {
        throw CheckpointError(Kind::kShapeMismatch,
                              "transplant: shape mismatch for '" + entry.name + "'");
      }
      report.skipped_shape.push_back(entry.name);
      continue;
    }
    result.store.find(entry.name)->data = src->data;
    report.transplanted.push_back(entry.name);
  }
  return result;
}

}  // namespace vostk
