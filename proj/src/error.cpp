#include "recfact/error.hpp"

namespace recfact {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kInput: return "input";
    case ErrorCode::kRange: return "range";
    case ErrorCode::kConvergence: return "convergence";
    case ErrorCode::kDegenerateSpectrum: return "degenerate-spectrum";
    case ErrorCode::kUndefinedSimilarity: return "undefined-similarity";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kEmptyData: return "empty-data";
    case ErrorCode::kCapacity: return "capacity";
    case ErrorCode::kContract: return "contract";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kGradient: return "gradient";
    case ErrorCode::kConditioning: return "conditioning";
    case ErrorCode::kEncoding: return "encoding";
    case ErrorCode::kUnknownId: return "unknown-id";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kArgument: return "argument";
    }
    return "unknown";
}

} // namespace recfact
