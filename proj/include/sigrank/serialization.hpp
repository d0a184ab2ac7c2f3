// Copyright 2026 The sigrank authors
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

#ifndef SIGRANK_SERIALIZATION_HPP
#define SIGRANK_SERIALIZATION_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "sigrank/errors.hpp"
#include "sigrank/feature_matrix.hpp"
#include "sigrank/index.hpp"

namespace sigrank {

// File formats, both little-endian:
//   DFV1: "DFV1", u32 n_rows, u32 n_cols, f32 values row-major.
//   SIDX: "SIDX", u16 version=1, u8 mode, u32 dim, u32 entry_count,
//         per entry [u16 id_len, id, u16 cat_len, cat, f64 mean[dim],
//         f64 cov[dim*dim]; gmm mode adds u32 k, f64 weights[k],
//         f64 means[k*dim], f64 diag_vars[k*dim]],
//         then u64 checksum = sum of all preceding bytes mod 2^64.

namespace detail {

inline void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(char(v & 0xff));
  buf.push_back(char((v >> 8) & 0xff));
}

inline void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& buf, float v) { put_u32(buf, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(std::string& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

// Bounds-checked little-endian reader over a loaded file image.
class Reader {
 public:
  Reader(const std::string& buf, const char* what) : buf_(buf), what_(what) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return buf_.size() - pos_; }

  void need(std::size_t n) const {
    if (remaining() < n) throw CorruptIndexError(std::string(what_) + ": truncated file");
  }

  std::uint8_t u8() {
    need(1);
    return std::uint8_t(buf_[pos_++]);
  }

  std::uint16_t u16() {
    need(2);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= std::uint16_t(std::uint8_t(buf_[pos_++])) << (8 * i);
    return v;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(buf_[pos_++])) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(buf_[pos_++])) << (8 * i);
    return v;
  }

  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  const std::string& buf_;
  const char* what_;
  std::size_t pos_ = 0;
};

inline std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string(what) + ": cannot open '" + path.string() + "'");
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& buf,
                       const char* what) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(std::string(what) + ": cannot open '" + path.string() + "' for write");
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw IoError(std::string(what) + ": short write to '" + path.string() + "'");
}

inline std::uint64_t byte_sum(const std::string& buf, std::size_t count) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < count; ++i) s += std::uint8_t(buf[i]);
  return s;
}

}  // namespace detail

inline void write_dfv1(const std::filesystem::path& path, const FeatureMatrix& f) {
  std::string buf;
  buf.reserve(12 + 4 * f.n_rows() * f.n_cols());
  buf += "DFV1";
  detail::put_u32(buf, std::uint32_t(f.n_rows()));
  detail::put_u32(buf, std::uint32_t(f.n_cols()));
  for (double v : f.values()) detail::put_f32(buf, float(v));
  detail::write_file(path, buf, "write_dfv1");
}

inline FeatureMatrix read_dfv1(const std::filesystem::path& path) {
  const std::string buf = detail::read_file(path, "read_dfv1");
  if (buf.size() < 12 || buf.compare(0, 4, "DFV1") != 0)
    throw FormatError("read_dfv1: '" + path.string() + "' is not a DFV1 file");
  detail::Reader r(buf, "read_dfv1");
  r.bytes(4);
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  if (rows == 0 || cols == 0)
    throw FormatError("read_dfv1: zero rows or columns in '" + path.string() + "'");
  const std::uint64_t expect = 12ull + 4ull * rows * cols;
  if (buf.size() != expect)
    throw FormatError("read_dfv1: '" + path.string() + "' has " + std::to_string(buf.size()) +
                      " bytes, expected " + std::to_string(expect));
  FeatureMatrix f(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) {
      const float v = r.f32();
      if (!std::isfinite(v))
        throw FormatError("read_dfv1: non-finite value at row " + std::to_string(i) +
                          ", column " + std::to_string(j) + " in '" + path.string() + "'");
      f.at(i, j) = double(v);
    }
  return f;
}

struct ManifestEntry {
  std::string item_id;
  std::string category;
  std::filesystem::path path;
};

// One record per line: item_id TAB category TAB feature_file_path.
// Lines starting with '#' are ignored. Relative paths resolve against the
// manifest's directory.
inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_manifest: cannot open '" + path.string() + "'");
  const std::filesystem::path base = path.parent_path();
  std::vector<ManifestEntry> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw FormatError("read_manifest: line " + std::to_string(lineno) +
                        " is not item_id<TAB>category<TAB>path");
    ManifestEntry e;
    e.item_id = line.substr(0, t1);
    e.category = line.substr(t1 + 1, t2 - t1 - 1);
    std::filesystem::path p = line.substr(t2 + 1);
    e.path = p.is_absolute() ? p : base / p;
    if (e.item_id.empty() || e.category.empty())
      throw FormatError("read_manifest: empty field on line " + std::to_string(lineno));
    if (!seen.insert(e.item_id).second)
      throw DuplicateItemError("read_manifest: duplicate item id '" + e.item_id + "'");
    out.push_back(std::move(e));
  }
  return out;
}

namespace detail {

constexpr std::uint16_t kSidxVersion = 1;
constexpr std::uint32_t kMaxDim = 1u << 20;

inline void put_string(std::string& buf, const std::string& s, const char* what) {
  if (s.size() > 0xffff) throw FormatError(std::string(what) + ": string longer than 65535 bytes");
  put_u16(buf, std::uint16_t(s.size()));
  buf += s;
}

}  // namespace detail

inline void save_index(const SignatureIndex& index, const std::filesystem::path& path) {
  if (index.dim == 0 || index.dim > detail::kMaxDim)
    throw FormatError("save_index: dim overflow (" + std::to_string(index.dim) + ")");
  std::string buf;
  buf += "SIDX";
  detail::put_u16(buf, detail::kSidxVersion);
  buf.push_back(char(std::uint8_t(index.mode)));
  detail::put_u32(buf, std::uint32_t(index.dim));
  detail::put_u32(buf, std::uint32_t(index.entries.size()));
  for (const IndexEntry& e : index.entries) {
    detail::put_string(buf, e.item_id, "save_index");
    detail::put_string(buf, e.category, "save_index");
    for (double v : e.signature.mean) detail::put_f64(buf, v);
    for (double v : e.signature.cov.data()) detail::put_f64(buf, v);
    if (index.mode == IndexMode::Gmm) {
      if (!e.gmm) throw FormatError("save_index: gmm-mode entry '" + e.item_id + "' lacks a gmm");
      detail::put_u32(buf, std::uint32_t(e.gmm->components()));
      for (double v : e.gmm->weights) detail::put_f64(buf, v);
      for (double v : e.gmm->means.data()) detail::put_f64(buf, v);
      for (double v : e.gmm->diag_vars.data()) detail::put_f64(buf, v);
    }
  }
  detail::put_u64(buf, detail::byte_sum(buf, buf.size()));
  detail::write_file(path, buf, "save_index");
}

inline SignatureIndex load_index(const std::filesystem::path& path) {
  const std::string buf = detail::read_file(path, "load_index");
  if (buf.size() < 4 + 2 + 1 + 4 + 4 + 8) throw CorruptIndexError("load_index: truncated file");
  if (buf.compare(0, 4, "SIDX") != 0) throw CorruptIndexError("load_index: bad magic");
  detail::Reader r(buf, "load_index");
  r.bytes(4);
  const std::uint16_t version = r.u16();
  if (version != detail::kSidxVersion)
    throw CorruptIndexError("load_index: unsupported version " + std::to_string(version) +
                            ", expected " + std::to_string(detail::kSidxVersion));
  {
    detail::Reader tail(buf, "load_index");
    tail.bytes(buf.size() - 8);
    const std::uint64_t stored = tail.u64();
    if (stored != detail::byte_sum(buf, buf.size() - 8))
      throw CorruptIndexError("load_index: checksum mismatch");
  }

  const std::uint8_t mode_byte = r.u8();
  if (mode_byte > 2)
    throw CorruptIndexError("load_index: unknown mode byte " + std::to_string(mode_byte));
  const std::uint32_t dim = r.u32();
  if (dim == 0 || dim > detail::kMaxDim)
    throw FormatError("load_index: dim overflow (" + std::to_string(dim) + ")");
  const std::uint32_t count = r.u32();

  SignatureIndex index;
  index.mode = IndexMode(mode_byte);
  index.dim = dim;
  index.build_config.mode = index.mode;
  index.entries.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    IndexEntry e;
    e.item_id = r.bytes(r.u16());
    e.category = r.bytes(r.u16());
    GaussianSignature sig{std::vector<double>(dim), SymMatrix(dim),
                          index.mode == IndexMode::Gmm
                              ? SignatureSource::GmmMoment
                              : (index.mode == IndexMode::Smt ? SignatureSource::Smt
                                                              : SignatureSource::Sample)};
    for (std::uint32_t i = 0; i < dim; ++i) sig.mean[i] = r.f64();
    Matrix cov(dim, dim);
    for (double& v : cov.data()) v = r.f64();
    // Stored matrices must be exactly symmetric, which also keeps the
    // round trip bitwise ((v+v)/2 == v).
    for (std::uint32_t i = 0; i < dim; ++i)
      for (std::uint32_t j = 0; j < dim; ++j)
        if (cov(i, j) != cov(j, i))
          throw CorruptIndexError("load_index: asymmetric covariance in entry '" + e.item_id +
                                  "'");
    sig.cov = SymMatrix::from_matrix(cov);
    e.signature = std::move(sig);
    if (index.mode == IndexMode::Gmm) {
      const std::uint32_t k = r.u32();
      if (k == 0) throw CorruptIndexError("load_index: zero-component gmm");
      GmmModel g;
      g.weights.resize(k);
      g.means = Matrix(k, dim);
      g.diag_vars = Matrix(k, dim);
      for (double& v : g.weights) v = r.f64();
      for (double& v : g.means.data()) v = r.f64();
      for (double& v : g.diag_vars.data()) v = r.f64();
      e.gmm = std::move(g);
    }
    index.entries.push_back(std::move(e));
  }
  if (r.pos() != buf.size() - 8)
    throw CorruptIndexError("load_index: trailing bytes before checksum");
  return index;
}

}  // namespace sigrank

#endif  // SIGRANK_SERIALIZATION_HPP
