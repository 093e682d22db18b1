#ifndef TRENDOP_ERROR_HPP
#define TRENDOP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace trendop {

/// Base class for all library errors. Carries the process exit status the
/// CLI reports for it.
class Error : public std::runtime_error {
  public:
    Error(const std::string &what, int exit_code)
        : std::runtime_error(what), m_exit_code(exit_code) {}

    int exit_code() const noexcept { return m_exit_code; }

  private:
    int m_exit_code;
};

/// Bad input: invalid parameters, out-of-domain arguments, short series,
/// malformed files. Exit status 2.
class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string &what) : Error(what, 2) {}
};

/// The numerics could not produce a trustworthy answer: duplicate points,
/// isolated kernel rows, eigensolver failure. Exit status 3.
class NumericalError : public Error {
  public:
    explicit NumericalError(const std::string &what) : Error(what, 3) {}
};

/// Rethrows `e` as the same error class with `stage: ` prepended.
[[noreturn]] void rethrow_with_stage(const Error &e, const std::string &stage);

} // namespace trendop

#endif
