/* Copyright 2026 The roleprobe Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ROLEPROBE_ERROR_HPP_
#define ROLEPROBE_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace roleprobe {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CoNLL-U input. `line()` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CorruptArchiveError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

// An archive lacks a sentence that the treebank asks for.
class MissingSentenceError : public Error {
 public:
  explicit MissingSentenceError(const std::string& id)
      : Error("archive has no sentence '" + id + "'"), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// Raised when an operation is asked to run on input that fails its
// precondition, e.g. swapping a clause that is not swap-eligible.
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, std::vector<std::string> reasons)
      : Error(what), reasons_(std::move(reasons)) {}
  const std::vector<std::string>& reasons() const { return reasons_; }

 private:
  std::vector<std::string> reasons_;
};

class InsufficientDataError : public Error {
 public:
  InsufficientDataError(const std::string& what, std::size_t subjects,
                        std::size_t objects)
      : Error(what + " (subjects=" + std::to_string(subjects) +
              ", objects=" + std::to_string(objects) + ")"),
        subjects_(subjects),
        objects_(objects) {}
  std::size_t subjects() const { return subjects_; }
  std::size_t objects() const { return objects_; }

 private:
  std::size_t subjects_;
  std::size_t objects_;
};

class TrainingDivergedError : public Error {
 public:
  TrainingDivergedError(int epoch, std::size_t batch)
      : Error("training diverged: non-finite loss at epoch " +
              std::to_string(epoch) + ", batch " + std::to_string(batch)),
        epoch_(epoch),
        batch_(batch) {}
  int epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }

 private:
  int epoch_;
  std::size_t batch_;
};

}  // namespace roleprobe

#endif  // ROLEPROBE_ERROR_HPP_
