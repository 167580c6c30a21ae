#pragma once

#include <stdexcept>
#include <string>

namespace syztrop {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// novikov
struct ZeroDivision : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };

// toric
struct NotSmooth : Error { using Error::Error; };
struct NotCalabiYau : Error { using Error::Error; };
struct BadDelta : Error { using Error::Error; };
struct CompactDivisorWithoutDelta : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };

// fibration
struct NotOnImage : Error { using Error::Error; };
struct NotOnVariety : Error { using Error::Error; };
struct ZeroCoordinate : Error { using Error::Error; };
struct NotInDomain : Error { using Error::Error; };
struct NotOnSingularFiber : Error { using Error::Error; };
struct ModelNotInvertible : Error { using Error::Error; };

// mirror
struct NotInChart : Error { using Error::Error; };
struct NotInOverlap : Error { using Error::Error; };

// lg
struct UnsupportedFamily : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

}  // namespace syztrop
