#include "maxent/log.hpp"

#include <cstdlib>
#include <iostream>

namespace maxent {

int log_verbosity() {
    static const int level = [] {
        const char* raw = std::getenv("MAXENT_LOG");
        return raw ? std::atoi(raw) : 0;
    }();
    return level;
}

LogLine::~LogLine() {
    if (enabled_) std::cerr << "[maxent] " << stream_.str() << std::endl;
}

} // namespace maxent
