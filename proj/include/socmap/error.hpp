#ifndef SOCMAP_ERROR_HPP
#define SOCMAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace socmap {

// Error categories map 1:1 to CLI exit codes.
enum class ErrorKind { usage = 2, data = 3, io = 4, internal = 5 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& msg) : Error(ErrorKind::usage, msg) {}
};

struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(ErrorKind::data, msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};

struct InternalError : Error {
    explicit InternalError(const std::string& msg) : Error(ErrorKind::internal, msg) {}
};

} // namespace socmap

#endif
