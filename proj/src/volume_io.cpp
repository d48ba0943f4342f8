/*=========================================================================
 *
 *  Copyright The segeval Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *         http://www.apache.org/licenses/LICENSE-2.0.txt
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 *
 *=========================================================================*/
#include "segeval/volume_io.hpp"

#include "segeval/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace segeval {
namespace {

// Header field offsets (NIfTI-1).
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffXyztUnits = 123;
constexpr std::size_t kOffQformCode = 252;
constexpr std::size_t kOffMagic = 344;

bool is_gzip(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B;
}

std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> in) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
    throw Error(ErrorKind::IoFailure, "cannot initialise gzip decoder");
  }
  std::vector<std::uint8_t> out(std::max<std::size_t>(in.size() * 4, 4096));
  zs.next_in = const_cast<Bytef *>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    if (zs.total_out == out.size()) {
      out.resize(out.size() * 2);
    }
    zs.next_out = out.data() + zs.total_out;
    zs.avail_out = static_cast<uInt>(out.size() - zs.total_out);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc == Z_BUF_ERROR && zs.avail_in == 0) {
      inflateEnd(&zs);
      throw Error(ErrorKind::TruncatedData, "gzip stream ended early");
    }
    if (rc != Z_OK && rc != Z_STREAM_END && rc != Z_BUF_ERROR) {
      inflateEnd(&zs);
      throw Error(ErrorKind::TruncatedData, "corrupt gzip stream");
    }
  }
  out.resize(zs.total_out);
  inflateEnd(&zs);
  return out;
}

/// Reads scalar fields in the file's byte order.
class FieldReader {
public:
  FieldReader(std::span<const std::uint8_t> bytes, bool swap) : bytes_(bytes), swap_(swap) {}

  template <typename T> T get(std::size_t offset) const {
    std::array<std::uint8_t, sizeof(T)> raw{};
    std::memcpy(raw.data(), bytes_.data() + offset, sizeof(T));
    if (swap_) {
      std::reverse(raw.begin(), raw.end());
    }
    return std::bit_cast<T>(raw);
  }

private:
  std::span<const std::uint8_t> bytes_;
  bool swap_;
};

template <typename T>
std::vector<T> decode_payload(std::span<const std::uint8_t> raw, std::size_t count, bool swap) {
  std::vector<T> out(count);
  std::memcpy(out.data(), raw.data(), count * sizeof(T));
  if (swap && sizeof(T) > 1) {
    auto *p = reinterpret_cast<std::uint8_t *>(out.data());
    for (std::size_t n = 0; n < count; ++n) {
      std::reverse(p + n * sizeof(T), p + (n + 1) * sizeof(T));
    }
  }
  return out;
}

std::size_t bytes_per_voxel(DataType t) {
  switch (t) {
  case DataType::UInt8: return 1;
  case DataType::Int16: return 2;
  case DataType::Int32: return 4;
  case DataType::Float32: return 4;
  }
  return 0;
}

bool known_datatype(std::int16_t code) {
  return code == 2 || code == 4 || code == 8 || code == 16;
}

template <typename T> void put(std::vector<std::uint8_t> &buf, std::size_t offset, T value) {
  static_assert(std::endian::native == std::endian::little,
                "write path assumes a little-endian host");
  std::memcpy(buf.data() + offset, &value, sizeof(T));
}

bool nontrivial_scaling(float slope, float inter) {
  const bool slope_set = std::isfinite(slope) && slope != 0.0f && slope != 1.0f;
  const bool inter_set = std::isfinite(inter) && inter != 0.0f;
  return slope_set || inter_set;
}

} // namespace

Volume decode_nifti(std::span<const std::uint8_t> input) {
  std::vector<std::uint8_t> inflated;
  std::span<const std::uint8_t> bytes = input;
  if (is_gzip(input)) {
    inflated = gunzip(input);
    bytes = inflated;
  }
  if (bytes.size() < kNiftiHeaderSize) {
    throw Error(ErrorKind::TruncatedData,
                "file holds " + std::to_string(bytes.size()) + " bytes, header needs 348");
  }

  const auto in_range = [](std::int16_t d0) { return d0 >= 1 && d0 <= 7; };
  bool swap = false;
  if (!in_range(FieldReader(bytes, false).get<std::int16_t>(kOffDim))) {
    swap = true;
    if (!in_range(FieldReader(bytes, true).get<std::int16_t>(kOffDim))) {
      throw Error(ErrorKind::InvalidHeader, "dim[0] is outside [1,7] in either byte order");
    }
  }
  const FieldReader hdr(bytes, swap);

  const auto sizeof_hdr = hdr.get<std::int32_t>(kOffSizeofHdr);
  if (sizeof_hdr != static_cast<std::int32_t>(kNiftiHeaderSize)) {
    throw Error(ErrorKind::HeaderSizeMismatch,
                "sizeof_hdr is " + std::to_string(sizeof_hdr) + ", expected 348");
  }

  const char *magic = reinterpret_cast<const char *>(bytes.data() + kOffMagic);
  if (std::memcmp(magic, "ni1\0", 4) == 0) {
    throw Error(ErrorKind::UnsupportedLayout,
                "header/image pair (.hdr/.img) files are not supported");
  }
  if (std::memcmp(magic, "n+1\0", 4) != 0) {
    throw Error(ErrorKind::BadMagic, "magic is not \"n+1\"");
  }

  const auto datatype = hdr.get<std::int16_t>(kOffDatatype);
  if (!known_datatype(datatype)) {
    throw Error(ErrorKind::UnsupportedDatatype,
                "datatype code " + std::to_string(datatype) +
                    " (supported: 2 uint8, 4 int16, 8 int32, 16 float32)");
  }
  const auto type = static_cast<DataType>(datatype);
  const auto bitpix = hdr.get<std::int16_t>(kOffBitpix);
  if (static_cast<std::size_t>(bitpix) != 8 * bytes_per_voxel(type)) {
    throw Error(ErrorKind::InvalidHeader,
                "bitpix " + std::to_string(bitpix) + " disagrees with datatype");
  }

  const int ndim = hdr.get<std::int16_t>(kOffDim);
  std::array<std::int64_t, 3> extent{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  for (int a = 1; a <= ndim; ++a) {
    const auto d = hdr.get<std::int16_t>(kOffDim + 2 * a);
    if (d < 1) {
      throw Error(ErrorKind::InvalidHeader, "dim[" + std::to_string(a) + "] is not positive");
    }
    if (a > 3) {
      if (d != 1) {
        throw Error(ErrorKind::InvalidHeader,
                    "dimension " + std::to_string(a) + " has extent " + std::to_string(d) +
                        "; only 3D volumes are supported");
      }
      continue;
    }
    extent[a - 1] = d;
    const auto p = hdr.get<float>(kOffPixdim + 4 * a);
    if (!std::isfinite(p) || p <= 0.0f) {
      throw Error(ErrorKind::InvalidHeader, "pixdim[" + std::to_string(a) + "] is not positive");
    }
    spacing[a - 1] = p;
  }
  const Geometry geometry{{extent[0], extent[1], extent[2]}, {spacing[0], spacing[1], spacing[2]}};

  const auto vox_offset = hdr.get<float>(kOffVoxOffset);
  if (!std::isfinite(vox_offset) || vox_offset < static_cast<float>(kNiftiHeaderSize)) {
    throw Error(ErrorKind::InvalidHeader, "vox_offset lies inside the header");
  }
  const auto offset = static_cast<std::size_t>(vox_offset);
  const auto count = static_cast<std::size_t>(geometry.dims.count());
  const auto need = count * bytes_per_voxel(type);
  if (bytes.size() < offset || bytes.size() - offset < need) {
    throw Error(ErrorKind::TruncatedData,
                "payload needs " + std::to_string(need) + " bytes after offset " +
                    std::to_string(offset) + ", file has " + std::to_string(bytes.size()));
  }
  const auto raw = bytes.subspan(offset, need);

  const auto slope = hdr.get<float>(kOffSclSlope);
  const auto inter = hdr.get<float>(kOffSclInter);
  const bool scaled = nontrivial_scaling(slope, inter);

  switch (type) {
  case DataType::UInt8:
  case DataType::Int16:
  case DataType::Int32:
    if (scaled) {
      throw Error(ErrorKind::RescaledLabels,
                  "integer data carries scl_slope/scl_inter; label maps must not be rescaled");
    }
    if (type == DataType::UInt8) {
      return Volume(geometry, decode_payload<std::uint8_t>(raw, count, swap));
    }
    if (type == DataType::Int16) {
      return Volume(geometry, decode_payload<std::int16_t>(raw, count, swap));
    }
    return Volume(geometry, decode_payload<std::int32_t>(raw, count, swap));
  case DataType::Float32: {
    auto values = decode_payload<float>(raw, count, swap);
    if (scaled) {
      const float m = (std::isfinite(slope) && slope != 0.0f) ? slope : 1.0f;
      const float b = std::isfinite(inter) ? inter : 0.0f;
      for (auto &x : values) {
        x = m * x + b;
      }
    }
    return Volume(geometry, std::move(values));
  }
  }
  throw Error(ErrorKind::UnsupportedDatatype, "unreachable datatype");
}

std::vector<std::uint8_t> encode_nifti(const Volume &v) {
  const auto type = v.datatype();
  const auto bpv = bytes_per_voxel(type);
  std::vector<std::uint8_t> buf(kNiftiDataOffset + v.size() * bpv, 0);

  const auto &d = v.dims();
  const auto &s = v.spacing();
  if (d.nx > INT16_MAX || d.ny > INT16_MAX || d.nz > INT16_MAX) {
    throw Error(ErrorKind::InvalidVolume, "dimension exceeds the NIfTI-1 limit of 32767");
  }
  put<std::int32_t>(buf, kOffSizeofHdr, static_cast<std::int32_t>(kNiftiHeaderSize));
  const std::array<std::int16_t, 8> dim{3,
                                        static_cast<std::int16_t>(d.nx),
                                        static_cast<std::int16_t>(d.ny),
                                        static_cast<std::int16_t>(d.nz),
                                        1, 1, 1, 1};
  const std::array<float, 8> pixdim{1.0f,
                                    static_cast<float>(s.sx),
                                    static_cast<float>(s.sy),
                                    static_cast<float>(s.sz),
                                    0.0f, 0.0f, 0.0f, 0.0f};
  for (int a = 0; a < 8; ++a) {
    put(buf, kOffDim + 2 * a, dim[a]);
    put(buf, kOffPixdim + 4 * a, pixdim[a]);
  }
  put(buf, kOffDatatype, static_cast<std::int16_t>(type));
  put(buf, kOffBitpix, static_cast<std::int16_t>(8 * bpv));
  put(buf, kOffVoxOffset, static_cast<float>(kNiftiDataOffset));
  put(buf, kOffSclSlope, 1.0f);
  put(buf, kOffSclInter, 0.0f);
  buf[kOffXyztUnits] = 2; // millimetres
  put<std::int16_t>(buf, kOffQformCode, 1);
  std::memcpy(buf.data() + kOffMagic, "n+1\0", 4);

  std::visit(
      [&](const auto &values) {
        std::memcpy(buf.data() + kNiftiDataOffset, values.data(), values.size() * bpv);
      },
      v.data());
  return buf;
}

Volume read_nifti(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorKind::IoFailure, "read failed on " + path.string());
  }
  try {
    return decode_nifti(bytes);
  } catch (const Error &e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_nifti(const Volume &v, const std::filesystem::path &path) {
  const auto bytes = encode_nifti(v);
  if (path.extension() == ".gz") {
    gzFile gz = gzopen(path.c_str(), "wb");
    if (gz == nullptr) {
      throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
    }
    const int written = gzwrite(gz, bytes.data(), static_cast<unsigned>(bytes.size()));
    const int closed = gzclose(gz);
    if (written != static_cast<int>(bytes.size()) || closed != Z_OK) {
      throw Error(ErrorKind::IoFailure, "write failed on " + path.string());
    }
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  }
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) {
    throw Error(ErrorKind::IoFailure, "write failed on " + path.string());
  }
}

Mask extract_mask(const Volume &v, const LabelSelector &sel) {
  if (sel.is_exact() && !v.is_integer()) {
    throw Error(ErrorKind::SelectorTypeMismatch,
                "exact-label selection requires integer voxel data");
  }
  std::vector<std::uint8_t> occ(v.size());
  std::visit(
      [&](const auto &values) {
        if (sel.is_exact()) {
          const auto label = sel.label();
          std::transform(values.begin(), values.end(), occ.begin(), [label](auto x) {
            return static_cast<std::uint8_t>(static_cast<std::int64_t>(x) == label);
          });
        } else {
          const double lo = sel.min();
          std::transform(values.begin(), values.end(), occ.begin(), [lo](auto x) {
            return static_cast<std::uint8_t>(static_cast<double>(x) >= lo);
          });
        }
      },
      v.data());
  return Mask(v.geometry(), std::move(occ));
}

Volume mask_to_volume(const Mask &m) {
  return Volume(m.geometry(), m.occupancy());
}

void check_grid_compat(const Mask &a, const Mask &b) {
  const auto &da = a.dims();
  const auto &db = b.dims();
  if (da != db) {
    const auto str = [](const Dims &d) {
      return std::to_string(d.nx) + "x" + std::to_string(d.ny) + "x" + std::to_string(d.nz);
    };
    throw Error(ErrorKind::GridMismatch, "grid " + str(da) + " does not match grid " + str(db));
  }
  static constexpr const char *kAxis[] = {"x", "y", "z"};
  for (int ax = 0; ax < 3; ++ax) {
    const double sa = a.spacing()[ax];
    const double sb = b.spacing()[ax];
    const double rel = std::abs(sa - sb) / std::max(std::abs(sa), std::abs(sb));
    if (rel > kSpacingRelTolerance) {
      throw Error(ErrorKind::SpacingMismatch,
                  std::string("spacing along ") + kAxis[ax] + " differs: " + std::to_string(sa) +
                      " vs " + std::to_string(sb));
    }
  }
}

} // namespace segeval
