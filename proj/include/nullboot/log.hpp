#pragma once

#include <functional>
#include <string>

namespace nullboot {

using WarningSink = std::function<void(const std::string&)>;

// Routes non-fatal diagnostics. Defaults to standard error; returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace nullboot
