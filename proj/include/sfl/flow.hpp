#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfl/core.hpp"
#include "sfl/index.hpp"
#include "sfl/locator.hpp"

namespace sfl {

struct ResonanceContribution {
    int segment = 0;
    double r = 0.0; // position within the segment parameter [0,1]
    int index = 0;
    int intersection = 0;
};

struct FlowReport {
    int tri = 0;
    int intersection = 0;
    int endpoint = 0;
    double ssf = 0.0;
    std::vector<ResonanceContribution> per_resonance;
    bool agreement = false;
};

struct TriBreakdown {
    int total = 0;
    std::vector<ResonanceContribution> contributions;
};

TriBreakdown total_resonance_index(const OperatorPath& path, double lambda, const Config& cfg = {});
int total_intersection_number(const OperatorPath& path, double lambda, const Config& cfg = {});
int endpoint_flow(const OperatorPath& path, double lambda, const Config& cfg = {});
double ssf_poisson(const OperatorPath& path, double lambda, const Config& cfg = {});

// All four engines with agreement flags.
FlowReport flow_report(const OperatorPath& path, double lambda, const Config& cfg = {});

// Finite-dimensional essential codimension of a projection pair: the index of
// PQ : im Q -> im P, which collapses to rank Q - rank P.
int essential_codimension(const Mat& P, const Mat& Q, const Config& cfg = {});
// Same number from the definition (kernel and cokernel dimensions of PQ).
int essential_codimension_by_kernels(const Mat& P, const Mat& Q, const Config& cfg = {});

struct AxiomResult {
    std::string axiom;
    int trials = 0;
    int failures = 0;
    std::vector<std::string> counterexamples;
};

struct RsAxiomReport {
    std::vector<AxiomResult> axioms;
    bool all_pass() const {
        for (const auto& a : axioms)
            if (a.failures != 0) return false;
        return true;
    }
};

RsAxiomReport rs_axiom_suite(const Config& cfg, std::uint64_t seed, int trials);

struct StabilityReport {
    int trials = 0;
    int failures = 0;
    std::vector<std::string> details;
};

// Perturbs V (and separately H) by random Hermitians of the given relative
// size; the resonance indices of the perturbed group must sum to the parent
// index in every trial.
StabilityReport stability_check(const Triple& t, const ResonancePoint& r, double perturbation_size,
                                int trials, std::uint64_t seed, const Config& cfg = {});

} // namespace sfl
