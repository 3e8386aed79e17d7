#include "etcon/error.hpp"

namespace etcon {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidGraph: return "InvalidGraph";
        case ErrorKind::NotConnected: return "NotConnected";
        case ErrorKind::NotBalanced: return "NotBalanced";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InvalidParameter: return "InvalidParameter";
        case ErrorKind::IsolatedAgent: return "IsolatedAgent";
        case ErrorKind::ZenoAbort: return "ZenoAbort";
        case ErrorKind::NotHurwitz: return "NotHurwitz";
        case ErrorKind::NotSPD: return "NotSPD";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::NoRootFound: return "NoRootFound";
        case ErrorKind::InsufficientDecay: return "InsufficientDecay";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace etcon
