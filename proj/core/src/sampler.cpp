#include "sagbell/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include <nlohmann/json.hpp>

#include "sagbell/errors.hpp"
#include "sagbell/philox.hpp"

namespace sagbell {

namespace {

// Draw slots within a shot; the counter layout is (shot_lo, shot_hi, slot, 0).
enum DrawSlot : uint32_t {
    kSlotPair = 0,
    kSlotBorn = 1,
    kSlotAliceEff = 2,
    kSlotBobEff = 3,
    kSlotAccept = 4,
};

double draw(uint64_t shot, uint32_t slot, Philox4x32::Key key) {
    Philox4x32::Counter ctr{static_cast<uint32_t>(shot & 0xFFFFFFFFu),
                            static_cast<uint32_t>(shot >> 32), slot, 0};
    return Philox4x32::uniform01(ctr, key);
}

std::array<std::array<Complex, 2>, 2> projector(const Vec3& n, int sign) {
    double s = sign > 0 ? 0.5 : -0.5;
    return {{{Complex{0.5 + s * n[2], 0.0}, Complex{s * n[0], -s * n[1]}},
             {Complex{s * n[0], s * n[1]}, Complex{0.5 - s * n[2], 0.0}}}};
}

// Accumulated per-pair coincidence tallies; integer counts keep the merge
// exact regardless of batch order.
struct Tally {
    std::array<uint64_t, 4> total{};
    std::array<uint64_t, 4> same{};  // product +1
    uint64_t coincidences = 0;

    void merge(const Tally& other) {
        for (int p = 0; p < 4; ++p) {
            total[static_cast<size_t>(p)] += other.total[static_cast<size_t>(p)];
            same[static_cast<size_t>(p)] += other.same[static_cast<size_t>(p)];
        }
        coincidences += other.coincidences;
    }
};

struct PairVectors {
    Vec3 alice;
    Vec3 bob;
};

}  // namespace

const char* to_string(SettingPair pair) {
    switch (pair) {
        case SettingPair::AB: return "ab";
        case SettingPair::ABPrime: return "ab'";
        case SettingPair::APrimeB: return "a'b";
        case SettingPair::APrimeBPrime: return "a'b'";
    }
    return "?";
}

std::array<double, 4> born_probabilities(const TwoQubitState& state, const Vec3& u,
                                         const Vec3& v) {
    state.check_normalized();
    std::array<Complex, 4> psi = {state.amp_hh, state.amp_hv, state.amp_vh, state.amp_vv};
    std::array<double, 4> p{};
    int idx = 0;
    for (int sa : {+1, -1}) {
        for (int sb : {+1, -1}) {
            auto A = projector(u, sa);
            auto B = projector(v, sb);
            Complex acc{0.0, 0.0};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int k = 0; k < 2; ++k)
                        for (int l = 0; l < 2; ++l)
                            acc += std::conj(psi[static_cast<size_t>(2 * i + j)]) *
                                   A[static_cast<size_t>(i)][static_cast<size_t>(k)] *
                                   B[static_cast<size_t>(j)][static_cast<size_t>(l)] *
                                   psi[static_cast<size_t>(2 * k + l)];
            p[static_cast<size_t>(idx++)] = acc.real();
        }
    }
    double sum = p[0] + p[1] + p[2] + p[3];
    if (std::abs(sum - 1.0) > 1e-12)
        throw PreconditionError("Born probabilities do not sum to 1");
    return p;
}

std::pair<int, int> born_sample(const TwoQubitState& state, const Vec3& u, const Vec3& v,
                                double rand01) {
    if (!(rand01 >= 0.0 && rand01 < 1.0))
        throw PreconditionError("born_sample needs rand01 in [0,1)");
    auto p = born_probabilities(state, u, v);
    static constexpr std::array<std::pair<int, int>, 4> kOutcomes = {
        std::pair<int, int>{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}};
    double cdf = 0.0;
    for (int i = 0; i < 4; ++i) {
        cdf += p[static_cast<size_t>(i)];
        if (rand01 < cdf) return kOutcomes[static_cast<size_t>(i)];
    }
    return kOutcomes[3];
}

ExperimentResult run_experiment(double phi, const MeasurementSetting& settings,
                                const DetectorModel& det, CircuitModel model) {
    settings.validate();
    if (!(det.efficiency >= 0.0 && det.efficiency <= 1.0))
        throw PreconditionError("efficiency must be in [0,1]");
    if (det.shots < 1) throw PreconditionError("shots must be >= 1");

    const TwoQubitState state = postselected_state(phi);
    const std::array<PairVectors, 4> pairs = {
        PairVectors{settings.a, settings.b},
        PairVectors{settings.a, settings.b_prime},
        PairVectors{settings.a_prime, settings.b},
        PairVectors{settings.a_prime, settings.b_prime},
    };
    std::array<std::array<double, 4>, 4> cdf{};
    for (int p = 0; p < 4; ++p) {
        auto probs = born_probabilities(state, pairs[static_cast<size_t>(p)].alice,
                                        pairs[static_cast<size_t>(p)].bob);
        double acc = 0.0;
        for (int o = 0; o < 4; ++o) {
            acc += probs[static_cast<size_t>(o)];
            cdf[static_cast<size_t>(p)][static_cast<size_t>(o)] = acc;
        }
        cdf[static_cast<size_t>(p)][3] = 1.0;
    }

    const double c = std::cos(phi);
    const double accept_prob =
        model == CircuitModel::Full12 ? (1.0 + c * c) / 32.0 : (1.0 + c * c) / 2.0;
    const auto key = Philox4x32::key_from_seed(det.seed);
    static constexpr std::array<std::pair<int, int>, 4> kOutcomes = {
        std::pair<int, int>{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}};

    ExperimentResult result;
    result.records.resize(det.shots);

    auto run_range = [&](uint64_t begin, uint64_t end) {
        Tally tally;
        for (uint64_t shot = begin; shot < end; ++shot) {
            auto pair_idx =
                std::min<uint32_t>(3, static_cast<uint32_t>(draw(shot, kSlotPair, key) * 4.0));
            double ub = draw(shot, kSlotBorn, key);
            int outcome = 3;
            for (int o = 0; o < 4; ++o) {
                if (ub < cdf[pair_idx][static_cast<size_t>(o)]) {
                    outcome = o;
                    break;
                }
            }
            bool alice_click = draw(shot, kSlotAliceEff, key) < det.efficiency;
            bool bob_click = draw(shot, kSlotBobEff, key) < det.efficiency;
            bool accepted = draw(shot, kSlotAccept, key) < accept_prob;

            ShotRecord rec;
            rec.shot_index = shot;
            rec.pair = static_cast<SettingPair>(pair_idx);
            auto [oa, ob] = kOutcomes[static_cast<size_t>(outcome)];
            rec.alice = (accepted && alice_click) ? static_cast<Outcome>(oa) : Outcome::NoClick;
            rec.bob = (accepted && bob_click) ? static_cast<Outcome>(ob) : Outcome::NoClick;
            rec.coincidence = rec.alice != Outcome::NoClick && rec.bob != Outcome::NoClick;
            result.records[shot] = rec;

            if (rec.coincidence) {
                ++tally.coincidences;
                ++tally.total[pair_idx];
                if (oa == ob) ++tally.same[pair_idx];
            }
        }
        return tally;
    };

    // Batch-parallel generation; the counter-based draws make every batch
    // independent of scheduling, and the merge is exact integer arithmetic.
    constexpr uint64_t kBatch = 1u << 16;
    Tally tally;
    if (det.shots <= kBatch) {
        tally = run_range(0, det.shots);
    } else {
        unsigned workers = std::max(1u, std::thread::hardware_concurrency());
        std::vector<std::future<Tally>> futures;
        for (uint64_t begin = 0; begin < det.shots; begin += kBatch * workers) {
            futures.clear();
            for (unsigned w = 0; w < workers; ++w) {
                uint64_t lo = begin + static_cast<uint64_t>(w) * kBatch;
                if (lo >= det.shots) break;
                uint64_t hi = std::min(det.shots, lo + kBatch);
                futures.push_back(
                    std::async(std::launch::async, [&, lo, hi] { return run_range(lo, hi); }));
            }
            for (auto& f : futures) tally.merge(f.get());
        }
    }

    ChshEstimate est;
    est.shots = det.shots;
    est.seed = det.seed;
    est.coincidences_per_pair = tally.total;
    est.coincidence_rate =
        static_cast<double>(tally.coincidences) / static_cast<double>(det.shots);
    bool defined = true;
    for (int p = 0; p < 4; ++p)
        if (tally.total[static_cast<size_t>(p)] == 0) defined = false;
    if (defined) {
        // S = E(ab) - E(ab') + E(a'b) + E(a'b'); per-correlator binomial
        // error propagation with E = 2q - 1, q = same/total.
        std::array<double, 4> e{}, var{};
        for (int p = 0; p < 4; ++p) {
            double n = static_cast<double>(tally.total[static_cast<size_t>(p)]);
            double q = static_cast<double>(tally.same[static_cast<size_t>(p)]) / n;
            e[static_cast<size_t>(p)] = 2.0 * q - 1.0;
            var[static_cast<size_t>(p)] = 4.0 * q * (1.0 - q) / n;
        }
        est.S_hat = e[0] - e[1] + e[2] + e[3];
        est.stderr_S = std::sqrt(var[0] + var[1] + var[2] + var[3]);
    }
    result.estimate = est;
    return result;
}

std::string record_to_json(const ShotRecord& record) {
    nlohmann::json j;
    j["shot"] = record.shot_index;
    j["pair"] = to_string(record.pair);
    j["alice"] = record.alice == Outcome::NoClick ? nlohmann::json(nullptr)
                                                  : nlohmann::json(static_cast<int>(record.alice));
    j["bob"] = record.bob == Outcome::NoClick ? nlohmann::json(nullptr)
                                              : nlohmann::json(static_cast<int>(record.bob));
    j["coincidence"] = record.coincidence;
    return j.dump();
}

std::string estimate_to_json(const ChshEstimate& estimate) {
    nlohmann::json j;
    j["S_hat"] = estimate.S_hat ? nlohmann::json(*estimate.S_hat) : nlohmann::json(nullptr);
    j["stderr"] =
        estimate.stderr_S ? nlohmann::json(*estimate.stderr_S) : nlohmann::json(nullptr);
    j["coincidence_rate"] = estimate.coincidence_rate;
    j["shots"] = estimate.shots;
    j["seed"] = estimate.seed;
    return j.dump();
}

}  // namespace sagbell
