#pragma once

#include <stdexcept>
#include <string>

namespace geoquant {

// Callers (notably the CLI) map the category onto an exit status:
// validation problems are the caller's fault, numeric problems arise while computing.
enum class ErrorCategory { validation, numeric };

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message, ErrorCategory category)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)), category_(category) {}

    const std::string& kind() const noexcept { return kind_; }
    ErrorCategory category() const noexcept { return category_; }

private:
    std::string kind_;
    ErrorCategory category_;
};

#define GEOQUANT_ERROR_TYPE(Name, tag, cat)                                   \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& message)                             \
            : Error(tag, message, ErrorCategory::cat) {}                      \
    };

GEOQUANT_ERROR_TYPE(ValidationError, "validation error", validation)
GEOQUANT_ERROR_TYPE(ShapeError, "shape error", validation)
GEOQUANT_ERROR_TYPE(StructureError, "structure error", validation)
GEOQUANT_ERROR_TYPE(PreconditionError, "precondition error", validation)
GEOQUANT_ERROR_TYPE(UnsupportedError, "unsupported", validation)
GEOQUANT_ERROR_TYPE(DomainError, "domain error", numeric)
GEOQUANT_ERROR_TYPE(BoundaryError, "boundary error", numeric)
GEOQUANT_ERROR_TYPE(OutOfDomainError, "out-of-domain error", numeric)
GEOQUANT_ERROR_TYPE(RangeError, "range error", numeric)
GEOQUANT_ERROR_TYPE(AliasingError, "aliasing error", numeric)
GEOQUANT_ERROR_TYPE(NumericError, "numeric error", numeric)

#undef GEOQUANT_ERROR_TYPE

}  // namespace geoquant
