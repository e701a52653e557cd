// Copyright 2026 The NSC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NSC_ERROR_H_
#define NSC_ERROR_H_

#include <stdexcept>
#include <string>

namespace nsc {

enum class ErrorKind {
  kUnsupportedFormat,
  kCorruptFile,
  kIoError,
  kEmptySignal,
  kNotEnoughFiles,
  kLengthMismatch,
  kShapeMismatch,
  kOddChannels,
  kTooFewDistinctValues,
  kCorruptPayload,
  kSymbolOutOfRange,
  kBadMagic,
  kUnsupportedVersion,
  kTruncated,
  kModelMismatch,
  kNanLoss,
  kInvalidArgument,
};

inline const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::kCorruptFile: return "CorruptFile";
    case ErrorKind::kIoError: return "IoError";
    case ErrorKind::kEmptySignal: return "EmptySignal";
    case ErrorKind::kNotEnoughFiles: return "NotEnoughFiles";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kOddChannels: return "OddChannels";
    case ErrorKind::kTooFewDistinctValues: return "TooFewDistinctValues";
    case ErrorKind::kCorruptPayload: return "CorruptPayload";
    case ErrorKind::kSymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorKind::kBadMagic: return "BadMagic";
    case ErrorKind::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::kTruncated: return "Truncated";
    case ErrorKind::kModelMismatch: return "ModelMismatch";
    case ErrorKind::kNanLoss: return "NanLoss";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

// All recoverable failures surface as Error. kind() is stable and
// machine-checkable; what() carries the detail, prefixed with the kind name
// so a single line is self-describing.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nsc

#endif  // NSC_ERROR_H_
