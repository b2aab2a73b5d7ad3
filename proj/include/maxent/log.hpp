#pragma once

#include <sstream>

namespace maxent {

// Verbosity read once from the MAXENT_LOG environment variable (default 0,
// meaning silent). Level 1 traces solver progress, level 2 adds per-cut
// detail.
int log_verbosity();

// One diagnostic line, flushed to stderr on destruction when enabled.
class LogLine {
public:
    explicit LogLine(bool enabled) : enabled_(enabled) {}
    LogLine(const LogLine&) = delete;
    LogLine& operator=(const LogLine&) = delete;
    ~LogLine();

    template <typename T>
    LogLine& operator<<(const T& value) {
        if (enabled_) stream_ << value;
        return *this;
    }

private:
    bool enabled_;
    std::ostringstream stream_;
};

} // namespace maxent

#define MAXENT_LOG(level) ::maxent::LogLine(::maxent::log_verbosity() >= (level))
