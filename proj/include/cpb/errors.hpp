#pragma once

#include <stdexcept>
#include <string>

namespace cpb {

// Recoverable error categories. The CLI maps each to a distinct exit code;
// usage errors are pinned to exit code 2.
enum class errc {
    usage = 2,
    parse = 3,
    range = 4,
    config = 5,
    data = 6,
    verify = 7,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::usage: return "usage";
        case errc::parse: return "parse";
        case errc::range: return "range";
        case errc::config: return "config";
        case errc::data: return "data";
        case errc::verify: return "verify";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(errc c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
    errc code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(code_); }

private:
    errc code_;
};

struct usage_error : error {
    explicit usage_error(const std::string& m) : error(errc::usage, m) {}
};
struct parse_error : error {
    explicit parse_error(const std::string& m) : error(errc::parse, m) {}
};
struct range_error : error {
    explicit range_error(const std::string& m) : error(errc::range, m) {}
};
struct config_error : error {
    explicit config_error(const std::string& m) : error(errc::config, m) {}
};
struct data_error : error {
    explicit data_error(const std::string& m) : error(errc::data, m) {}
};
struct verify_error : error {
    explicit verify_error(const std::string& m) : error(errc::verify, m) {}
};

// Programmer error: a library precondition was violated or an internal
// invariant failed. Not meant to be caught by callers.
class contract_violation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

[[noreturn]] inline void contract_fail(const std::string& msg) {
    throw contract_violation(msg);
}

}  // namespace cpb

// Always-on precondition check; never compiled out in Release.
#define CPB_CHECK(cond, msg)               \
    do {                                   \
        if (!(cond)) ::cpb::contract_fail( \
            std::string(__FILE__) + ":" + std::to_string(__LINE__) + ": " + (msg)); \
    } while (0)
