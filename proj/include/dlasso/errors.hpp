#pragma once

#include <stdexcept>
#include <string>

namespace dlasso {

// All failures carry a short machine-parsable name (stable across releases,
// printed on stderr by the CLI) plus a human-readable message.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& msg)
        : std::runtime_error(name + ": " + msg), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define DLASSO_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                     \
    public:                                                         \
        explicit Name(const std::string& msg) : Error(#Name, msg) {} \
    }

DLASSO_DEFINE_ERROR(NotSPD);
DLASSO_DEFINE_ERROR(DiagonalTooLarge);
DLASSO_DEFINE_ERROR(DimensionMismatch);
DLASSO_DEFINE_ERROR(BadSparsity);
DLASSO_DEFINE_ERROR(DegenerateFit);
DLASSO_DEFINE_ERROR(TauNonPositive);
DLASSO_DEFINE_ERROR(BadAlpha);
DLASSO_DEFINE_ERROR(EmptySupport);
DLASSO_DEFINE_ERROR(RankDeficient);
DLASSO_DEFINE_ERROR(ModelTooLarge);
DLASSO_DEFINE_ERROR(BadConfig);
DLASSO_DEFINE_ERROR(IoError);

#undef DLASSO_DEFINE_ERROR

}  // namespace dlasso
