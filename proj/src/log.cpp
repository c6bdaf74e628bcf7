#include "nullboot/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace nullboot {

namespace {

std::mutex g_sink_mutex;

WarningSink& sink_ref() {
    static WarningSink sink = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return sink;
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
    std::lock_guard<std::mutex> lock(g_sink_mutex);
    return std::exchange(sink_ref(), std::move(sink));
}

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(g_sink_mutex);
    if (sink_ref()) sink_ref()(message);
}

}  // namespace nullboot
