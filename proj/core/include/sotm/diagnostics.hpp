#pragma once

#include <functional>
#include <string_view>

namespace sotm {

using WarningSink = std::function<void(std::string_view)>;

/// Installs a process-wide sink for non-fatal warnings and returns the
/// previous one. Passing an empty function restores the stderr default.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace sotm
