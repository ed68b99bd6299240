// errors.hpp
// Exception types shared by every ablkit module.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ablkit {

// Whether an error stems from bad input (usage, parsing, malformed objects) or
// from a well-formed question that has no answer (e.g. impossible
// postselection). The CLI maps these to exit codes 1 and 2.
enum class ErrorClass { input, domain };

class Error : public std::runtime_error {
public:
    Error(std::string_view kind, ErrorClass cls, const std::string& what)
        : std::runtime_error(what), kind_(kind), class_(cls) {}

    std::string_view kind() const noexcept { return kind_; }
    ErrorClass error_class() const noexcept { return class_; }

private:
    std::string_view kind_;
    ErrorClass class_;
};

#define ABLKIT_DEFINE_ERROR(Name, Cls)                                        \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(#Name, Cls, what) {}   \
    }

ABLKIT_DEFINE_ERROR(InvalidArgument, ErrorClass::input);
ABLKIT_DEFINE_ERROR(DimensionMismatch, ErrorClass::input);
ABLKIT_DEFINE_ERROR(DegenerateSpan, ErrorClass::input);
ABLKIT_DEFINE_ERROR(InvalidProjector, ErrorClass::input);
ABLKIT_DEFINE_ERROR(InvalidDecomposition, ErrorClass::input);
ABLKIT_DEFINE_ERROR(IndexOutOfRange, ErrorClass::input);
ABLKIT_DEFINE_ERROR(TooManyBranches, ErrorClass::input);
ABLKIT_DEFINE_ERROR(ParseError, ErrorClass::input);

ABLKIT_DEFINE_ERROR(ImpossiblePostselection, ErrorClass::domain);
ABLKIT_DEFINE_ERROR(ZeroProjection, ErrorClass::domain);
ABLKIT_DEFINE_ERROR(UndefinedTerm, ErrorClass::domain);
ABLKIT_DEFINE_ERROR(NotFound, ErrorClass::domain);
ABLKIT_DEFINE_ERROR(NoPostselectedTrials, ErrorClass::domain);

#undef ABLKIT_DEFINE_ERROR

}  // namespace ablkit
