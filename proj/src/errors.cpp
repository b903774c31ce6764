#include "sqzloop/errors.hpp"

#include <fmt/core.h>

namespace sqzloop {

SingularityError::SingularityError(double frequency_hz, double magnitude)
    : std::runtime_error(fmt::format(
          "servo singularity: |1 - sqrt(t)G| = {:.3g} at f = {:.6g} Hz",
          magnitude, frequency_hz)),
      frequency_hz_(frequency_hz),
      magnitude_(magnitude) {}

ParseError::ParseError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, what)
                                  : what),
      line_(line) {}

IoError::IoError(const std::string& path, const std::string& what)
    : std::runtime_error(fmt::format("{}: {}", path, what)), path_(path) {}

}  // namespace sqzloop
