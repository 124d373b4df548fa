#include "tnbs/charge.hpp"

#include "tnbs/errors.hpp"

namespace tnbs {

std::string to_string(Charge c) {
  return "(" + std::to_string(c.first) + "," + std::to_string(c.second) + ")";
}

PhysicalSpace::PhysicalSpace(int d, bool doubled) : d_(d), doubled_(doubled) {
  if (d < 1) throw DomainError("local dimension must be at least 1");
}

}  // namespace tnbs
