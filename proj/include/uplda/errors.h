// uplda/errors.h

// Copyright 2026  The uplda Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef UPLDA_ERRORS_H_
#define UPLDA_ERRORS_H_

#include <stdexcept>
#include <string>

namespace uplda {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched vector/matrix dimensions between related objects.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on argument values was violated (nonpositive precision,
/// zero-vector input to a scaling op, bad configuration, ...).
class ValueError : public Error {
 public:
  using Error::Error;
};

/// Data too degenerate to estimate from (singular even after flooring).
class SingularError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number.
class TextParseError : public Error {
 public:
  TextParseError(int line, const std::string &msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int Line() const { return line_; }

 private:
  int line_;
};

/// Binary archive I/O failure.  Each failure mode is a distinct kind so
/// callers (and tests) can tell them apart.
class ArchiveError : public Error {
 public:
  enum class Kind {
    kIo,                  // open/read/write/rename failed
    kBadMagic,            // file kind marker does not match
    kTruncated,           // ran out of bytes mid-record
    kTrailingData,        // extra bytes after the last record
    kDimensionMismatch,   // payload dimension disagrees with header or caller
    kBadId,               // identifier is not valid UTF-8
    kDuplicateId,         // same identifier appears twice in one archive
    kMissingUncertainty,  // uncertainty requested but archive has none
    kBadPayload,          // non-finite or otherwise inadmissible values
  };

  ArchiveError(Kind kind, const std::string &msg) : Error(msg), kind_(kind) {}
  Kind GetKind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace uplda

#endif  // UPLDA_ERRORS_H_
