#pragma once

#include <stdexcept>
#include <string>

namespace mtforge {

class error : public std::runtime_error {
public:
  explicit error(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace mtforge
