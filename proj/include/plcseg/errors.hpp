#ifndef PLCSEG_ERRORS_HPP
#define PLCSEG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace plcseg {

/// Exit codes used by the CLI. Each pipeline failure maps onto exactly one.
enum class error_code : int {
    ok                 = 0,
    stage_failure      = 1,
    config             = 2,
    io                 = 3,
    no_candidates      = 4,
    no_segments        = 5,
    no_high_elevation  = 6,
    ambiguous_orientation = 7,
    fit_failure        = 8,
};

class error : public std::runtime_error
{
  public:
    error(error_code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] error_code code() const noexcept { return code_; }

  private:
    error_code code_;
};

class io_error : public error
{
  public:
    explicit io_error(const std::string& what) : error(error_code::io, what) {}
};

/// Malformed input. Reported through the I/O exit code.
class parse_error : public io_error
{
  public:
    using io_error::io_error;
};

class config_error : public error
{
  public:
    explicit config_error(const std::string& what) : error(error_code::config, what) {}
};

/// A pipeline stage found nothing to pass downstream.
class stage_error : public error
{
  public:
    using error::error;
};

} // namespace plcseg

#endif // PLCSEG_ERRORS_HPP
