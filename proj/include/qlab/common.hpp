#pragma once

#include <stdexcept>
#include <string>

namespace qlab {

// Error taxonomy used across the library:
//   ValidationError : a parameter is outside its documented domain
//   StructuralError : shapes/descriptors of the operands do not fit together
//   CapacityError   : the request exceeds a hard enumeration/size cap
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& m) : std::runtime_error(m) {}
};
struct StructuralError : std::runtime_error {
  explicit StructuralError(const std::string& m) : std::runtime_error(m) {}
};
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& m) : std::runtime_error(m) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}
inline void require_shape(bool cond, const std::string& msg) {
  if (!cond) throw StructuralError(msg);
}

}  // namespace qlab
