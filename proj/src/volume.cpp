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
#include "segeval/volume.hpp"

#include "segeval/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace segeval {

void validate_geometry(const Geometry &g) {
  const auto &d = g.dims;
  if (d.nx < 1 || d.ny < 1 || d.nz < 1) {
    throw Error(ErrorKind::InvalidVolume,
                "dimensions must be positive, got " + std::to_string(d.nx) + "x" +
                    std::to_string(d.ny) + "x" + std::to_string(d.nz));
  }
  for (int a = 0; a < 3; ++a) {
    const double s = g.spacing[a];
    if (!std::isfinite(s) || s <= 0.0) {
      throw Error(ErrorKind::InvalidVolume,
                  "spacing must be finite and positive on every axis");
    }
  }
}

Volume::Volume(Geometry geometry, VoxelData data)
    : geometry_(geometry), data_(std::move(data)) {
  validate_geometry(geometry_);
  const auto n = std::visit([](const auto &v) { return v.size(); }, data_);
  if (n != size()) {
    throw Error(ErrorKind::InvalidVolume,
                "data length " + std::to_string(n) + " does not match " +
                    std::to_string(size()) + " voxels");
  }
}

DataType Volume::datatype() const noexcept {
  switch (data_.index()) {
  case 0: return DataType::UInt8;
  case 1: return DataType::Int16;
  case 2: return DataType::Int32;
  default: return DataType::Float32;
  }
}

double Volume::value(std::size_t n) const {
  return std::visit([n](const auto &v) { return static_cast<double>(v.at(n)); }, data_);
}

Mask::Mask(Geometry geometry)
    : geometry_(geometry) {
  validate_geometry(geometry_);
  occupancy_.assign(static_cast<std::size_t>(geometry_.dims.count()), 0);
}

Mask::Mask(Geometry geometry, std::vector<std::uint8_t> occupancy)
    : geometry_(geometry), occupancy_(std::move(occupancy)) {
  validate_geometry(geometry_);
  if (occupancy_.size() != static_cast<std::size_t>(geometry_.dims.count())) {
    throw Error(ErrorKind::InvalidVolume, "occupancy length does not match grid");
  }
  for (auto &b : occupancy_) {
    b = b != 0 ? 1 : 0;
  }
}

std::size_t Mask::popcount() const noexcept {
  return static_cast<std::size_t>(std::count(occupancy_.begin(), occupancy_.end(), 1));
}

Mask Mask::with_spacing(const Spacing &s) const {
  return Mask(Geometry{geometry_.dims, s}, occupancy_);
}

} // namespace segeval
