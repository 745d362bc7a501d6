#include "htlab/errors.hpp"

#include <sstream>

namespace htlab {

namespace {
std::string with_estimate(const std::string& what, double estimate) {
  std::ostringstream os;
  os.precision(3);
  os << what << " (error estimate " << estimate << ")";
  return os.str();
}
}  // namespace

AccuracyError::AccuracyError(const std::string& what, double estimate)
    : Error(with_estimate(what, estimate)), estimate_(estimate) {}

}  // namespace htlab
