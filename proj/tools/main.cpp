#include <atomic>
#include <csignal>
#include <iostream>

#include "ordinary/cli.hpp"

namespace {
std::atomic<bool> g_interrupt{false};
extern "C" void on_interrupt(int) { g_interrupt.store(true); }
}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);
    return ordinary::cli::run({argv + 1, argv + argc}, std::cout, std::cerr, &g_interrupt);
}
