#pragma once

#include <stdexcept>
#include <string>

namespace sfl {

// Typed failure conditions. Numerical guards throw instead of returning junk.
enum class Errc {
    NonHermitian,
    DimensionMismatch,
    InvalidInput,
    ResolventSingular,
    ThresholdTooClose,
    NoRegularBasePoint,
    IllConditionedEigenproblem,
    ResonantEndpoint,
    GroupLeak,
    ContourCrossesPole,
    QuadratureNotConverged,
    RankAmbiguous,
    SDependence,
    NotAResonanceVector,
    CriterionMismatch,
    Unstable,
    SignatureAmbiguous,
    TrackingAmbiguous,
    GroupCollision,
    CycleJordanMismatch,
    SignDisagreement,
    ExponentMismatch,
    NoConvergence,
    BranchEntanglement,
    OrderAmbiguous,
    DerivativeNoise,
    BMatrixSingular,
    RootBracketFail,
    TangencyMismatch,
    ResonantVertex,
    DNotHermitian,
    GenerationFailed,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace sfl
