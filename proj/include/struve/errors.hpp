#pragma once

#include <stdexcept>
#include <string>

namespace struve {

/// Base class for every failure raised by the engine. `name()` is the
/// stable identifier the CLI prints (e.g. "MaxStepsExceeded").
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define STRUVE_DEFINE_ERROR(Type)                                       \
    class Type : public Error {                                         \
    public:                                                             \
        explicit Type(const std::string& what) : Error(#Type, what) {}  \
    };

STRUVE_DEFINE_ERROR(InvalidArgument)
STRUVE_DEFINE_ERROR(VanishingLinearTerm)
STRUVE_DEFINE_ERROR(BranchPointError)
STRUVE_DEFINE_ERROR(MaxStepsExceeded)
STRUVE_DEFINE_ERROR(ContinuationAmbiguous)
STRUVE_DEFINE_ERROR(BracketInvalid)
STRUVE_DEFINE_ERROR(NoConvergence)
STRUVE_DEFINE_ERROR(StepTooLarge)
STRUVE_DEFINE_ERROR(PoleAtNonpositiveInteger)
STRUVE_DEFINE_ERROR(DomainError)
STRUVE_DEFINE_ERROR(OnTransitionUnsupported)

#undef STRUVE_DEFINE_ERROR

}  // namespace struve
