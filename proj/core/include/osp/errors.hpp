#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace osp {

// All library failures carry a stable machine-readable name alongside the
// human-readable message; the CLI prints the name and tests match on it.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

[[noreturn]] inline void raise(std::string name, const std::string& message) {
    throw Error(std::move(name), message);
}

}  // namespace osp
