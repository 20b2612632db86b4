#pragma once

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

// Shared harness for the acceptance suites: every criterion prints one
// pass/fail line, and the binary exits nonzero if anything failed.

namespace wqed::acceptance {

struct Harness {
    int failures = 0;
    int current = 0;

    void criterion(int number, const std::string& title,
                   const std::function<bool(std::string&)>& body) {
        current = number;
        std::string detail;
        bool ok = false;
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number, title.c_str(),
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }

    int exit_code() const { return failures == 0 ? 0 : 1; }
};

inline std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

}  // namespace wqed::acceptance
