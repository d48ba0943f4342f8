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
#ifndef SEGEVAL_VOLUME_IO_HPP
#define SEGEVAL_VOLUME_IO_HPP

#include "segeval/volume.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace segeval {

/// Size of the NIfTI-1 header and offset of the voxel payload written by
/// write_nifti (header + 4-byte empty extension flag).
inline constexpr std::size_t kNiftiHeaderSize = 348;
inline constexpr std::size_t kNiftiDataOffset = 352;

/// Decode a single-file NIfTI-1 image held in memory. Gzip input (leading
/// bytes 0x1F 0x8B) is inflated first. Byte order is inferred from dim[0].
/// Orientation fields are parsed past but not retained.
Volume decode_nifti(std::span<const std::uint8_t> bytes);

/// Encode as little-endian ".nii": 348-byte header, vox_offset 352, magic "n+1".
std::vector<std::uint8_t> encode_nifti(const Volume &v);

/// Reads ".nii" or ".nii.gz" (compression detected from content, not name).
Volume read_nifti(const std::filesystem::path &path);

/// Writes ".nii"; paths ending in ".gz" are gzip-compressed.
void write_nifti(const Volume &v, const std::filesystem::path &path);

/// Which voxels of a label or intensity volume become foreground.
class LabelSelector {
public:
  static LabelSelector exact(std::int64_t label) { return LabelSelector(true, label, 0.0); }
  static LabelSelector threshold(double min_inclusive) {
    return LabelSelector(false, 0, min_inclusive);
  }

  bool is_exact() const noexcept { return exact_; }
  std::int64_t label() const noexcept { return label_; }
  double min() const noexcept { return min_; }

private:
  LabelSelector(bool exact, std::int64_t label, double min)
      : exact_(exact), label_(label), min_(min) {}

  bool exact_;
  std::int64_t label_;
  double min_;
};

/// Exact-label selection on float data throws SelectorTypeMismatch.
Mask extract_mask(const Volume &v, const LabelSelector &sel);

/// 0/1 unsigned 8-bit volume with the mask's geometry.
Volume mask_to_volume(const Mask &m);

inline constexpr double kSpacingRelTolerance = 1e-5;

/// Throws GridMismatch when dims differ, SpacingMismatch when any axis
/// spacing differs by more than kSpacingRelTolerance relative.
void check_grid_compat(const Mask &a, const Mask &b);

} // namespace segeval

#endif
