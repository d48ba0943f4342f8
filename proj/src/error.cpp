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
#include "segeval/error.hpp"

namespace segeval {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::BadMagic: return "BadMagic";
  case ErrorKind::UnsupportedDatatype: return "UnsupportedDatatype";
  case ErrorKind::UnsupportedLayout: return "UnsupportedLayout";
  case ErrorKind::HeaderSizeMismatch: return "HeaderSizeMismatch";
  case ErrorKind::InvalidHeader: return "InvalidHeader";
  case ErrorKind::TruncatedData: return "TruncatedData";
  case ErrorKind::RescaledLabels: return "RescaledLabels";
  case ErrorKind::IoFailure: return "IoFailure";
  case ErrorKind::SelectorTypeMismatch: return "SelectorTypeMismatch";
  case ErrorKind::GridMismatch: return "GridMismatch";
  case ErrorKind::SpacingMismatch: return "SpacingMismatch";
  case ErrorKind::InvalidVolume: return "InvalidVolume";
  case ErrorKind::OutOfBounds: return "OutOfBounds";
  case ErrorKind::InvalidArgument: return "InvalidArgument";
  case ErrorKind::BothEmpty: return "BothEmpty";
  case ErrorKind::EmptyMask: return "EmptyMask";
  case ErrorKind::EmptySurface: return "EmptySurface";
  case ErrorKind::EmptyDistances: return "EmptyDistances";
  case ErrorKind::DegenerateVariance: return "DegenerateVariance";
  case ErrorKind::LengthMismatch: return "LengthMismatch";
  case ErrorKind::TooFewCases: return "TooFewCases";
  case ErrorKind::AllZeroDifferences: return "AllZeroDifferences";
  case ErrorKind::ZeroBaseline: return "ZeroBaseline";
  case ErrorKind::NoPairedCases: return "NoPairedCases";
  case ErrorKind::TooFewDelineations: return "TooFewDelineations";
  case ErrorKind::InvalidManifest: return "InvalidManifest";
  }
  return "Unknown";
}

bool is_io_error(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::BadMagic:
  case ErrorKind::UnsupportedDatatype:
  case ErrorKind::UnsupportedLayout:
  case ErrorKind::HeaderSizeMismatch:
  case ErrorKind::InvalidHeader:
  case ErrorKind::TruncatedData:
  case ErrorKind::RescaledLabels:
  case ErrorKind::IoFailure:
    return true;
  default:
    return false;
  }
}

} // namespace segeval
