#pragma once

#include <stdexcept>
#include <string>

namespace maxent {

// Base class for all library errors. Callers that only need coarse handling
// can catch this; the derived types below carry the precise failure mode.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input / construction problems.
struct InvalidFamily : Error { using Error::Error; };
struct InvalidInput : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// Enumeration hit its configured cap before finishing.
struct CapExceeded : Error { using Error::Error; };

// Counting failures.
struct EmptyFamily : Error { using Error::Error; };
struct Disconnected : Error { using Error::Error; };
struct SideMismatch : Error { using Error::Error; };
struct SizeExceeded : Error { using Error::Error; };
struct NumericalFailure : Error { using Error::Error; };

// Linear-algebra contract failures.
struct RankDeficient : Error { using Error::Error; };
struct BadBasis : Error { using Error::Error; };
struct DegenerateNormal : Error { using Error::Error; };

// Solver failures.
struct NotInterior : Error { using Error::Error; };
struct MaxIterations : Error { using Error::Error; };
struct NoGuessSucceeded : Error { using Error::Error; };
struct GapExceeded : Error { using Error::Error; };
struct SolverContractViolation : Error { using Error::Error; };

// Tour-construction demo failures.
struct InfeasibleMarginals : Error { using Error::Error; };
struct NoHamiltonianClosure : Error { using Error::Error; };

} // namespace maxent
