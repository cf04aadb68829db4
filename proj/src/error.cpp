#include "emdec/error.hpp"

namespace emdec {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::InvalidMesh: return "invalid mesh";
    case ErrorKind::NotWellCentered: return "mesh not well-centered";
    case ErrorKind::GenerationFailed: return "mesh generation failed";
    case ErrorKind::NumericalBlowup: return "numerical blowup";
    case ErrorKind::EstimateFailed: return "estimate failed";
    case ErrorKind::StaggerError: return "stagger error";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::ConfigError: return "config error";
    case ErrorKind::IoError: return "i/o error";
  }
  return "error";
}

}  // namespace emdec
