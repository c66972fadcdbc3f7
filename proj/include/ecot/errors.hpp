#pragma once

#include <stdexcept>
#include <string>

namespace ecot {

// Base for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- construction / configuration --
struct InvalidCurve : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };

// -- curve arithmetic --
struct InvalidPoint : Error { using Error::Error; };
struct DegenerateX : Error { using Error::Error; };   // rhs == 0: single y=0 point, no two-point lift
struct Exhausted : Error { using Error::Error; };     // bounded retry loop ran out
struct TooLarge : Error { using Error::Error; };      // beyond the brute-force scan bound

// -- encoding --
struct OutOfRange : Error { using Error::Error; };
struct Unencodable : Error { using Error::Error; };

// -- protocol state machines --
struct PhaseError : Error { using Error::Error; };
struct DegenerateValue : Error { using Error::Error; };   // identity landed in a message slot
struct LengthMismatch : Error { using Error::Error; };
struct MissingBasePoint : Error { using Error::Error; };
struct VerificationFailed : Error { using Error::Error; };
struct AbortedByPeer : Error { using Error::Error; };

// -- wire / transport --
struct UnknownTag : Error { using Error::Error; };
struct TruncatedFrame : Error { using Error::Error; };
struct HandshakeMismatch : Error { using Error::Error; };
struct ConnectionLost : Error { using Error::Error; };
struct Timeout : Error { using Error::Error; };

}  // namespace ecot
