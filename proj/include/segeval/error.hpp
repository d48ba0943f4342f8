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
#ifndef SEGEVAL_ERROR_HPP
#define SEGEVAL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace segeval {

/// Every failure the library reports carries one of these kinds.
enum class ErrorKind {
  // volume-io
  BadMagic,
  UnsupportedDatatype,
  UnsupportedLayout,
  HeaderSizeMismatch,
  InvalidHeader,
  TruncatedData,
  RescaledLabels,
  IoFailure,
  SelectorTypeMismatch,
  GridMismatch,
  SpacingMismatch,
  InvalidVolume,
  // phantom
  OutOfBounds,
  InvalidArgument,
  BothEmpty,
  // surface
  EmptyMask,
  EmptySurface,
  EmptyDistances,
  // stats
  DegenerateVariance,
  LengthMismatch,
  TooFewCases,
  AllZeroDifferences,
  ZeroBaseline,
  NoPairedCases,
  TooFewDelineations,
  // cli
  InvalidManifest,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for failures caused by reading or decoding files, as opposed to
/// inputs that parse fine but violate a precondition.
bool is_io_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace segeval

#endif
