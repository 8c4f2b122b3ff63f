#pragma once

#include "sfl/core.hpp"
#include "sfl/locator.hpp"
#include "sfl/riesz.hpp"

namespace sfl {

// Half-plane migration count of the group of a real resonance point.
struct IndexReport {
    int n_plus = 0;
    int n_minus = 0;
    int index = 0;
    double y_used = 0.0;
    bool stable = false;
};

IndexReport resonance_index(const Triple& t, const ResonancePoint& r, const Config& cfg = {});

struct ResonanceMatrix {
    Mat M;             // Hermitized V P_lambda(r)
    int rank = 0;
    int signature = 0;
    double herm_residual = 0.0;
};

ResonanceMatrix resonance_matrix(const Triple& t, const ResonancePoint& r, const Config& cfg = {});

struct IndexSignatureCheck {
    int index = 0;
    int signature = 0;
    bool agree = false;
};

IndexSignatureCheck index_signature_check(const Triple& t, const ResonancePoint& r,
                                          const Config& cfg = {});

} // namespace sfl
