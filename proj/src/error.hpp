// Library-wide exception type carrying the status code surfaced at the C
// boundary. Core code throws; capi.cpp catches and translates.
#pragma once

#include <stdexcept>
#include <string>

#include "psirmon/psirmon.h"

namespace psirmon {

class Error : public std::runtime_error {
public:
    Error(psirmon_status status, const std::string &message)
        : std::runtime_error(message), status_(status) {}

    psirmon_status status() const { return status_; }

private:
    psirmon_status status_;
};

[[noreturn]] inline void fail_invalid(const std::string &message) {
    throw Error(PSIRMON_ERR_INVALID_ARGUMENT, message);
}

[[noreturn]] inline void fail_numeric(const std::string &message) {
    throw Error(PSIRMON_ERR_NUMERIC, message);
}

[[noreturn]] inline void fail_io(const std::string &message) {
    throw Error(PSIRMON_ERR_IO, message);
}

[[noreturn]] inline void fail_parse(const std::string &message) {
    throw Error(PSIRMON_ERR_PARSE, message);
}

} // namespace psirmon
