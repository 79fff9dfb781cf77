#pragma once

#include <stdexcept>
#include <string>

namespace bf {

struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& m) : std::runtime_error(m) {}
};

struct infeasible_error : std::runtime_error {
  explicit infeasible_error(const std::string& m) : std::runtime_error(m) {}
};

struct io_error : std::runtime_error {
  explicit io_error(const std::string& m) : std::runtime_error(m) {}
};

} // namespace bf
