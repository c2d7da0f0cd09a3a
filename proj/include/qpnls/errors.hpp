#pragma once

#include <stdexcept>
#include <string>

namespace qpnls {

// Error taxonomy shared across modules. The CLI maps these onto exit codes:
// parse_error -> 2, failed invariant -> 3, capacity/divergence -> 4.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

class argument_error : public error {
public:
  using error::error;
};

class domain_error : public error {
public:
  using error::error;
};

class structure_error : public error {
public:
  using error::error;
};

class capacity_error : public error {
public:
  using error::error;
};

class precondition_error : public error {
public:
  using error::error;
};

class divergence_error : public error {
public:
  using error::error;
};

class parse_error : public error {
public:
  explicit parse_error(const std::string& what, std::string key_path = "")
      : error(key_path.empty() ? what : what + " (at " + key_path + ")"),
        key_path_(std::move(key_path)) {}
  const std::string& key_path() const { return key_path_; }

private:
  std::string key_path_;
};

}  // namespace qpnls
