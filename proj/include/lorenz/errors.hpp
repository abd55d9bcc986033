#pragma once

#include <stdexcept>
#include <string>

namespace lorenz {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// derivative/schwarzian requested at the critical point
struct CriticalPointDerivative : Error {
    explicit CriticalPointDerivative(double x)
        : Error("derivative undefined within eps_critical of the critical point (x=" +
                std::to_string(x) + ")") {}
};

// invert_branch target outside the closed image of the chosen branch
struct ValueOutsideBranchImage : Error {
    ValueOutsideBranchImage(double y, double lo, double hi)
        : Error("value " + std::to_string(y) + " outside branch image [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "]") {}
};

struct NotNiceError : Error {
    using Error::Error;
};

struct HorizonExhausted : Error {
    using Error::Error;
};

struct PreimageTreeEmpty : Error {
    using Error::Error;
};

struct NoPeriodicOrbitInWindow : Error {
    using Error::Error;
};

struct NoApproximantFound : Error {
    using Error::Error;
};

struct RecordInvalid : Error {
    using Error::Error;
};

struct NoReturnWithinHorizon : Error {
    using Error::Error;
};

// violation of the pairwise nesting law for renormalization intervals;
// carries the offending pair as a witness
struct LinkedIntervalsDetected : Error {
    double a0, b0, a1, b1;
    LinkedIntervalsDetected(double a0_, double b0_, double a1_, double b1_)
        : Error("linked renormalization intervals: (" + std::to_string(a0_) + ", " +
                std::to_string(b0_) + ") vs (" + std::to_string(a1_) + ", " +
                std::to_string(b1_) + ")"),
          a0(a0_), b0(b0_), a1(a1_), b1(b1_) {}
};

struct BranchOverlap : Error {
    using Error::Error;
};

struct WrongBranchCount : Error {
    using Error::Error;
};

struct OrbitHitGap : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace lorenz
