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
#ifndef SEGEVAL_VOLUME_HPP
#define SEGEVAL_VOLUME_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

namespace segeval {

/// Voxel counts along x, y, z.
struct Dims {
  std::int64_t nx = 1;
  std::int64_t ny = 1;
  std::int64_t nz = 1;

  std::int64_t count() const noexcept { return nx * ny * nz; }
  std::int64_t operator[](int axis) const noexcept {
    return axis == 0 ? nx : (axis == 1 ? ny : nz);
  }
  friend bool operator==(const Dims &, const Dims &) = default;
};

/// Millimetres per voxel along x, y, z.
struct Spacing {
  double sx = 1.0;
  double sy = 1.0;
  double sz = 1.0;

  double operator[](int axis) const noexcept {
    return axis == 0 ? sx : (axis == 1 ? sy : sz);
  }
  double voxel_volume() const noexcept { return sx * sy * sz; }
  friend bool operator==(const Spacing &, const Spacing &) = default;
};

struct Index3 {
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t k = 0;

  friend bool operator==(const Index3 &, const Index3 &) = default;
  friend auto operator<=>(const Index3 &, const Index3 &) = default;
};

/// Shared grid description. Linear index is x-fastest.
struct Geometry {
  Dims dims;
  Spacing spacing;

  bool contains(const Index3 &p) const noexcept {
    return p.i >= 0 && p.j >= 0 && p.k >= 0 && p.i < dims.nx &&
           p.j < dims.ny && p.k < dims.nz;
  }
  std::size_t linear(const Index3 &p) const noexcept {
    return static_cast<std::size_t>((p.k * dims.ny + p.j) * dims.nx + p.i);
  }
  Index3 unravel(std::size_t n) const noexcept {
    const auto v = static_cast<std::int64_t>(n);
    return {v % dims.nx, (v / dims.nx) % dims.ny, v / (dims.nx * dims.ny)};
  }
  friend bool operator==(const Geometry &, const Geometry &) = default;
};

/// Throws InvalidVolume unless dims are >= 1 and spacings finite and > 0.
void validate_geometry(const Geometry &g);

enum class DataType : std::int16_t {
  UInt8 = 2,
  Int16 = 4,
  Int32 = 8,
  Float32 = 16,
};

using VoxelData = std::variant<std::vector<std::uint8_t>, std::vector<std::int16_t>,
                               std::vector<std::int32_t>, std::vector<float>>;

/// Dense scalar volume. Immutable after construction.
class Volume {
public:
  Volume(Geometry geometry, VoxelData data);

  const Geometry &geometry() const noexcept { return geometry_; }
  const Dims &dims() const noexcept { return geometry_.dims; }
  const Spacing &spacing() const noexcept { return geometry_.spacing; }
  const VoxelData &data() const noexcept { return data_; }
  DataType datatype() const noexcept;
  bool is_integer() const noexcept { return datatype() != DataType::Float32; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(geometry_.dims.count()); }
  double value(std::size_t n) const;

  friend bool operator==(const Volume &, const Volume &) = default;

private:
  Geometry geometry_;
  VoxelData data_;
};

/// Binary occupancy on a grid. One byte per voxel, values 0 or 1.
class Mask {
public:
  explicit Mask(Geometry geometry);
  Mask(Geometry geometry, std::vector<std::uint8_t> occupancy);

  const Geometry &geometry() const noexcept { return geometry_; }
  const Dims &dims() const noexcept { return geometry_.dims; }
  const Spacing &spacing() const noexcept { return geometry_.spacing; }
  std::size_t size() const noexcept { return occupancy_.size(); }

  bool operator[](std::size_t n) const noexcept { return occupancy_[n] != 0; }
  bool at(const Index3 &p) const noexcept { return occupancy_[geometry_.linear(p)] != 0; }
  void set(std::size_t n, bool on) noexcept { occupancy_[n] = on ? 1 : 0; }
  void set(const Index3 &p, bool on) noexcept { set(geometry_.linear(p), on); }

  const std::vector<std::uint8_t> &occupancy() const noexcept { return occupancy_; }
  std::size_t popcount() const noexcept;
  bool empty() const noexcept { return popcount() == 0; }

  /// Same grid, different spacing.
  Mask with_spacing(const Spacing &s) const;

  friend bool operator==(const Mask &, const Mask &) = default;

private:
  Geometry geometry_;
  std::vector<std::uint8_t> occupancy_;
};

} // namespace segeval

#endif
