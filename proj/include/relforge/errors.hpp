#pragma once

#include <stdexcept>
#include <string>

namespace relforge {

// Errors carry a category so the CLI can map them to stable exit codes
// (1 usage, 2 data, 3 model).

class usage_error : public std::runtime_error {
public:
  explicit usage_error(const std::string& msg) : std::runtime_error(msg) {}
};

class data_error : public std::runtime_error {
public:
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

class model_error : public std::runtime_error {
public:
  explicit model_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace relforge
