#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sfl/config.hpp"

namespace sfl {

struct CheckStat {
    long checks = 0;
    long failures = 0;
    double worst = 0.0;
    std::vector<std::string> notes;

    void record(bool ok, double value = 0.0, const std::string& note = "") {
        ++checks;
        if (value > worst) worst = value;
        if (!ok) {
            ++failures;
            if (notes.size() < 8 && !note.empty()) notes.push_back(note);
        }
    }
};

struct VerifyReport {
    std::map<std::string, CheckStat> stats;
    long numerical_errors = 0;
    std::vector<std::string> error_notes;

    long total_failures() const {
        long n = 0;
        for (const auto& [k, s] : stats) n += s.failures;
        return n;
    }
    void merge(const VerifyReport& other);
};

// Runs the invariant suites of every module over `trials` random instances
// (kinds cycle through random triples, prescribed-order instances, degenerate
// eigenvalues, direct sums, and full paths). Deterministic for fixed seed.
VerifyReport run_verify(const Config& cfg, std::uint64_t seed, int trials);

std::string verify_summary(const VerifyReport& rep);

} // namespace sfl
