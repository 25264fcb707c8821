#pragma once

#include <stdexcept>
#include <string>

namespace wine {

// Each error category maps onto one CLI exit code.
enum class error_kind { domain = 1, config = 2, geometry = 3, io = 4 };

class error : public std::runtime_error {
public:
    error(error_kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    error_kind kind() const noexcept { return kind_; }

private:
    error_kind kind_;
};

class domain_error : public error {
public:
    explicit domain_error(const std::string& what) : error(error_kind::domain, what) {}
};

class config_error : public error {
public:
    explicit config_error(const std::string& what) : error(error_kind::config, what) {}
};

class geometry_error : public error {
public:
    explicit geometry_error(const std::string& what) : error(error_kind::geometry, what) {}
};

class io_error : public error {
public:
    explicit io_error(const std::string& what) : error(error_kind::io, what) {}
};

// Rethrows with the same concrete type so callers can still catch by category.
[[noreturn]] inline void throw_error(error_kind kind, const std::string& what) {
    switch (kind) {
    case error_kind::config: throw config_error(what);
    case error_kind::geometry: throw geometry_error(what);
    case error_kind::io: throw io_error(what);
    case error_kind::domain: break;
    }
    throw domain_error(what);
}

inline int exit_code(error_kind kind) noexcept {
    switch (kind) {
    case error_kind::config: return 2;
    case error_kind::geometry: return 3;
    case error_kind::io: return 4;
    case error_kind::domain: return 2;
    }
    return 1;
}

}  // namespace wine
