#ifndef QUADTOPE_ERROR_HPP
#define QUADTOPE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

namespace quadtope {

// Structured error: machine-readable code + detail payload. The CLI prints
// these as JSON on stderr and exits 1.
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string message, nlohmann::json details = {})
        : std::runtime_error(message),
          code_(std::move(code)),
          details_(std::move(details)) {}

    const std::string& code() const { return code_; }
    const nlohmann::json& details() const { return details_; }

    nlohmann::json to_json() const {
        return nlohmann::json{{"error", code_}, {"message", what()}, {"details", details_}};
    }

private:
    std::string code_;
    nlohmann::json details_;
};

}  // namespace quadtope

#endif
