#include "hdboot/error.hpp"

#include <atomic>
#include <iostream>
#include <string>

namespace hdboot {

namespace {

void stderr_handler(std::string_view message) {
  std::cerr << "hdboot warning: " << message << '\n';
}

std::atomic<WarningHandler> g_handler{&stderr_handler};

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) noexcept {
  return g_handler.exchange(handler ? handler : &stderr_handler);
}

void warn(std::string_view message) { g_handler.load()(message); }

}  // namespace hdboot
