#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gridlat {

/// Error carrying the pipeline stage that raised it; what() reads "[stage] message".
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& message)
        : std::runtime_error("[" + stage + "] " + message), stage_(std::move(stage)) {}

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace gridlat
