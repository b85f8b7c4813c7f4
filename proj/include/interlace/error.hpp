#pragma once

#include <stdexcept>
#include <string>

namespace interlace {

/// Error families, numbered to match the CLI exit-code contract.
enum class errc : int {
    invalid_input = 2,
    degenerate_statistic = 3,
    numeric_failure = 4,
};

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    errc code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(code_); }

  private:
    errc code_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
    throw error(errc::invalid_input, what);
}

[[noreturn]] inline void throw_degenerate(const std::string& what) {
    throw error(errc::degenerate_statistic, what);
}

[[noreturn]] inline void throw_numeric(const std::string& what) {
    throw error(errc::numeric_failure, what);
}

} // namespace interlace
