#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace emdec {

enum class ErrorKind {
  InvalidArgument,
  InvalidMesh,
  NotWellCentered,
  GenerationFailed,
  NumericalBlowup,
  EstimateFailed,
  StaggerError,
  Unsupported,
  ConfigError,
  IoError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when an update produces a non-finite value. `step` is the step
/// index for uniform stepping; for asynchronous stepping `step` is the fire
/// count and `face` the firing face.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(std::int64_t step, std::int64_t face, const std::string& message)
      : Error(ErrorKind::NumericalBlowup, message), step_(step), face_(face) {}

  std::int64_t step() const { return step_; }
  std::int64_t face() const { return face_; }

 private:
  std::int64_t step_;
  std::int64_t face_;
};

}  // namespace emdec
