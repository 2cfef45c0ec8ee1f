#include "fracac/error.hpp"

namespace fracac {

const char* kind_name(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::config: return "config";
    case ErrorKind::shape: return "shape";
    case ErrorKind::blowup: return "blowup";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::singular: return "singular";
    case ErrorKind::io: return "io";
    case ErrorKind::window: return "window";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

}  // namespace fracac
