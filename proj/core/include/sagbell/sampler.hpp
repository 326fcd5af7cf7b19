#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sagbell/bell.hpp"

namespace sagbell {

/// Detector parameters for a finite-statistics run. Efficiency is the
/// per-detector click probability; photon loss lowers the coincidence rate
/// without biasing the post-selected state, so the estimate stays centered
/// while its variance grows.
// TODO(dark counts): add a dark_count_prob field once a noise model needs it.
struct DetectorModel {
    double efficiency = 1.0;
    uint64_t seed = 0;
    uint64_t shots = 1;
};

enum class SettingPair : uint8_t { AB = 0, ABPrime = 1, APrimeB = 2, APrimeBPrime = 3 };

const char* to_string(SettingPair pair);

enum class Outcome : int8_t { Minus = -1, NoClick = 0, Plus = 1 };

struct ShotRecord {
    uint64_t shot_index = 0;
    SettingPair pair = SettingPair::AB;
    Outcome alice = Outcome::NoClick;
    Outcome bob = Outcome::NoClick;
    bool coincidence = false;
};

/// Finite-statistics CHSH estimate. S_hat/stderr are absent when any of the
/// four correlators collected zero coincidences (flagged, not an error).
struct ChshEstimate {
    std::optional<double> S_hat;
    std::optional<double> stderr_S;
    double coincidence_rate = 0.0;
    uint64_t shots = 0;
    uint64_t seed = 0;
    std::array<uint64_t, 4> coincidences_per_pair{};
};

enum class CircuitModel { Core4, Full12 };

struct ExperimentResult {
    std::vector<ShotRecord> records;
    ChshEstimate estimate;
};

/// Exact four-outcome Born distribution of the state measured along Bloch
/// directions (u, v), in outcome order (+,+), (+,-), (-,+), (-,-); sums to 1
/// within 1e-12.
std::array<double, 4> born_probabilities(const TwoQubitState& state, const Vec3& u,
                                         const Vec3& v);

/// Inverse-CDF sample of the joint outcome from one uniform draw in [0,1).
std::pair<int, int> born_sample(const TwoQubitState& state, const Vec3& u, const Vec3& v,
                                double rand01);

/// Seeded Monte Carlo run against postselected_state(phi). Per shot: a
/// uniformly random setting pair, a Born-rule joint outcome, an independent
/// efficiency draw per side, and a coincidence-acceptance draw with
/// probability (1+cos^2 phi)/2 for the loop-only model or (1+cos^2 phi)/32
/// for the full routed one. Shots that fail acceptance or lose a photon are
/// recorded with no-click outcomes and excluded from the estimate, so the
/// post-selected fraction is itself an observable. Fully reproducible from
/// the seed; batches are generated in parallel and merged by shot index.
ExperimentResult run_experiment(double phi, const MeasurementSetting& settings,
                                const DetectorModel& det,
                                CircuitModel model = CircuitModel::Full12);

/// One-line JSON for the newline-delimited record stream:
/// {"shot":..,"pair":"ab","alice":1,"bob":-1,"coincidence":true}
/// (no-click outcomes serialize as null).
std::string record_to_json(const ShotRecord& record);

/// {"S_hat":..,"stderr":..,"coincidence_rate":..,"shots":..,"seed":..}
/// with null S_hat/stderr when the estimate is undefined.
std::string estimate_to_json(const ChshEstimate& estimate);

}  // namespace sagbell
