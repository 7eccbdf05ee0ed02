#pragma once

#include <stdexcept>
#include <string>

namespace recfact {

enum class ErrorCode {
    kShape,              // operand dimensions disagree
    kInput,              // non-finite or otherwise unusable numeric input
    kRange,              // index / count / threshold out of its legal range
    kConvergence,        // iterative solver hit its cap
    kDegenerateSpectrum, // all singular values are zero
    kUndefinedSimilarity,
    kParse,
    kValidation,
    kDuplicate,
    kEmptyData,
    kCapacity,
    kContract,
    kDivergence,
    kGradient,
    kConditioning,
    kEncoding,
    kUnknownId,
    kFormat,
    kIo,
    kArgument,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const char* what)
{
    if (!cond)
        fail(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what)
{
    if (!cond)
        fail(code, what);
}

} // namespace recfact
