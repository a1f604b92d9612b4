#include "core/errors.hpp"

namespace magweyl {

void require(bool cond, const std::string& message, const std::string& field) {
  if (!cond) throw InvalidArgument(message, field);
}

}  // namespace magweyl
