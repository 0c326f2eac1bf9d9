#pragma once

#include <functional>
#include <string>

namespace hqs {

using WarningHandler = std::function<void(const std::string&)>;

/// Replaces the warning sink (default: stderr). Returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace hqs
