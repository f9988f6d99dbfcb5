#pragma once

#include <stdexcept>
#include <string>

namespace placelab {

/// Malformed input data: CSV structure, JSON schema, config files.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A VM that cannot be hosted by any PM under the active strategy.
class InfeasibleError : public std::runtime_error {
  public:
    InfeasibleError(const std::string& what, int vm_id)
        : std::runtime_error(what), vm_id_(vm_id) {}

    int vm_id() const { return vm_id_; }

  private:
    int vm_id_;
};

} // namespace placelab
