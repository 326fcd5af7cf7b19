#include "sagbell/fock.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "sagbell/errors.hpp"

namespace sagbell {

namespace {

// Photon numbers stay at 2 for the protocol and below ~8 for any sane test
// corpus; exact integer factorials until the final conversion to double.
long long factorial_int(int n) {
    if (n < 0 || n > 16)
        throw PreconditionError("photon number out of supported range: " + std::to_string(n));
    long long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

long long binomial_int(int n, int k) {
    return factorial_int(n) / (factorial_int(k) * factorial_int(n - k));
}

Complex ipow(Complex base, int exp) {
    Complex r{1.0, 0.0};
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

void check_mode(const ModeRegistry& reg, int mode) {
    if (mode < 0 || mode >= reg.size())
        throw RegistryError("mode index " + std::to_string(mode) + " not in registry");
}

}  // namespace

Mat2 Mat2::identity() {
    Mat2 u;
    u.m[0][0] = u.m[1][1] = 1.0;
    return u;
}

Mat2 Mat2::dagger() const {
    Mat2 d;
    d.m[0][0] = std::conj(m[0][0]);
    d.m[0][1] = std::conj(m[1][0]);
    d.m[1][0] = std::conj(m[0][1]);
    d.m[1][1] = std::conj(m[1][1]);
    return d;
}

bool Mat2::is_unitary(double tol) const {
    // u * u^dagger == I
    Mat2 d = dagger();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Complex s = m[i][0] * d.m[0][j] + m[i][1] * d.m[1][j];
            Complex expect = (i == j) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
            if (std::abs(s - expect) > tol) return false;
        }
    }
    return true;
}

FockState::FockState(std::shared_ptr<const ModeRegistry> registry, TermMap terms)
    : registry_(std::move(registry)), terms_(std::move(terms)) {
    if (!registry_) throw RegistryError("FockState requires a registry");
    for (const auto& [occ, amp] : terms_) {
        if (static_cast<int>(occ.size()) != registry_->size())
            throw RegistryError("occupation vector length does not match registry size");
        for (int n : occ)
            if (n < 0) throw PreconditionError("negative photon count");
        (void)amp;
    }
}

FockState FockState::vacuum(std::shared_ptr<const ModeRegistry> registry) {
    TermMap t;
    t.emplace(OccupationVector(static_cast<size_t>(registry->size()), 0), Complex{1.0, 0.0});
    return FockState(std::move(registry), std::move(t));
}

Complex FockState::amplitude(const OccupationVector& occ) const {
    auto it = terms_.find(occ);
    return it == terms_.end() ? Complex{0.0, 0.0} : it->second;
}

double FockState::squared_norm() const {
    double s = 0.0;
    for (const auto& [occ, amp] : terms_) s += std::norm(amp);
    return s;
}

double FockState::norm() const { return std::sqrt(squared_norm()); }

int FockState::total_photons() const {
    if (terms_.empty()) return 0;
    const auto& occ = terms_.begin()->first;
    int n = 0;
    for (int c : occ) n += c;
    return n;
}

FockState FockState::normalized() const {
    double n = norm();
    if (n <= 0.0) throw PreconditionError("cannot normalize a null state");
    return scaled(Complex{1.0 / n, 0.0});
}

FockState FockState::scaled(Complex factor) const {
    TermMap t = terms_;
    for (auto& [occ, amp] : t) amp *= factor;
    return FockState(registry_, std::move(t));
}

FockState FockState::pruned(double threshold) const {
    TermMap t;
    for (const auto& [occ, amp] : terms_)
        if (std::abs(amp) >= threshold) t.emplace(occ, amp);
    return FockState(registry_, std::move(t));
}

FockState operator+(const FockState& a, const FockState& b) {
    if (!a.registry().same_layout(b.registry()))
        throw RegistryError("cannot add states over different registries");
    FockState::TermMap t = a.terms_;
    for (const auto& [occ, amp] : b.terms_) t[occ] += amp;
    return FockState(a.registry_, std::move(t));
}

FockState make_state(std::shared_ptr<const ModeRegistry> registry,
                     const std::vector<int>& creation_modes) {
    if (creation_modes.empty())
        throw PreconditionError("creation list must be non-empty");
    OccupationVector occ(static_cast<size_t>(registry->size()), 0);
    for (int m : creation_modes) {
        check_mode(*registry, m);
        ++occ[static_cast<size_t>(m)];
    }
    FockState::TermMap t;
    t.emplace(std::move(occ), Complex{1.0, 0.0});
    // The raw monomial prod (a_m+)^n |0> has norm sqrt(prod n!); normalize it
    // away so make_state always yields a unit vector.
    return FockState(std::move(registry), std::move(t));
}

FockState make_state(std::shared_ptr<const ModeRegistry> registry,
                     const std::vector<std::string>& creation_labels) {
    std::vector<int> modes;
    modes.reserve(creation_labels.size());
    for (const auto& label : creation_labels) modes.push_back(registry->require(label));
    return make_state(std::move(registry), modes);
}

FockState apply_mode_transform(const FockState& state, const Mat2& u, int m1, int m2,
                               double prune_threshold) {
    const auto& reg = state.registry();
    check_mode(reg, m1);
    check_mode(reg, m2);
    if (m1 == m2) throw PreconditionError("mode transform requires two distinct modes");
    if (!u.is_unitary()) throw PreconditionError("mode transform matrix is not unitary");

    FockState::TermMap out;
    for (const auto& [occ, amp] : state.terms()) {
        int n1 = occ[static_cast<size_t>(m1)];
        int n2 = occ[static_cast<size_t>(m2)];
        if (n1 == 0 && n2 == 0) {
            out[occ] += amp;
            continue;
        }
        // (a1+)^n1 (a2+)^n2 -> sum over binomial splits of the substituted
        // operators; amplitude bookkeeping carries the sqrt(n!) factors of
        // the occupation basis.
        double base = 1.0 / std::sqrt(static_cast<double>(factorial_int(n1)) *
                                      static_cast<double>(factorial_int(n2)));
        for (int j = 0; j <= n1; ++j) {
            for (int k = 0; k <= n2; ++k) {
                int na = j + k;
                int nb = (n1 - j) + (n2 - k);
                Complex w = static_cast<double>(binomial_int(n1, j) * binomial_int(n2, k)) *
                            ipow(u.m[0][0], j) * ipow(u.m[0][1], n1 - j) *
                            ipow(u.m[1][0], k) * ipow(u.m[1][1], n2 - k);
                if (w == Complex{0.0, 0.0}) continue;
                Complex coeff = amp * base * w *
                                std::sqrt(static_cast<double>(factorial_int(na)) *
                                          static_cast<double>(factorial_int(nb)));
                OccupationVector no = occ;
                no[static_cast<size_t>(m1)] = na;
                no[static_cast<size_t>(m2)] = nb;
                out[std::move(no)] += coeff;
            }
        }
    }
    return FockState(state.registry_ptr(), std::move(out)).pruned(prune_threshold);
}

FockState apply_phase(const FockState& state, int mode, double theta) {
    check_mode(state.registry(), mode);
    FockState::TermMap out;
    for (const auto& [occ, amp] : state.terms()) {
        int n = occ[static_cast<size_t>(mode)];
        out.emplace(occ, amp * std::exp(Complex{0.0, theta * n}));
    }
    return FockState(state.registry_ptr(), std::move(out));
}

FockState apply_mode_swap(const FockState& state, int m1, int m2) {
    const auto& reg = state.registry();
    check_mode(reg, m1);
    check_mode(reg, m2);
    if (m1 == m2) return state;
    FockState::TermMap out;
    for (const auto& [occ, amp] : state.terms()) {
        OccupationVector no = occ;
        std::swap(no[static_cast<size_t>(m1)], no[static_cast<size_t>(m2)]);
        out.emplace(std::move(no), amp);
    }
    return FockState(state.registry_ptr(), std::move(out));
}

Projection project_onto_counts(const FockState& state,
                               const std::map<ModeRole, int>& constraint) {
    const auto& reg = state.registry();
    std::vector<std::pair<std::vector<int>, int>> resolved;
    for (const auto& [role, count] : constraint) {
        std::vector<int> modes;
        if (role == ModeRole::Alice)
            modes = reg.detection_modes(Party::Alice);
        else if (role == ModeRole::Bob)
            modes = reg.detection_modes(Party::Bob);
        else
            modes = reg.modes_with_role(role);
        if (modes.empty())
            throw RegistryError(std::string("no modes with role '") + to_string(role) +
                                "' in registry");
        if (count < 0) throw PreconditionError("required photon count must be >= 0");
        resolved.emplace_back(std::move(modes), count);
    }

    FockState::TermMap kept;
    double mass = 0.0;
    for (const auto& [occ, amp] : state.terms()) {
        bool ok = true;
        for (const auto& [modes, count] : resolved) {
            int n = 0;
            for (int m : modes) n += occ[static_cast<size_t>(m)];
            if (n != count) {
                ok = false;
                break;
            }
        }
        if (ok) {
            mass += std::norm(amp);
            kept.emplace(occ, amp);
        }
    }

    if (kept.empty() || mass <= 0.0) {
        return Projection{FockState(state.registry_ptr(), {}), 0.0, true};
    }
    double inv = 1.0 / std::sqrt(mass);
    for (auto& [occ, amp] : kept) amp *= inv;
    return Projection{FockState(state.registry_ptr(), std::move(kept)), mass, false};
}

Complex inner_product(const FockState& s1, const FockState& s2) {
    if (!s1.registry().same_layout(s2.registry()))
        throw RegistryError("inner product requires matching registries");
    const auto& a = s1.terms();
    const auto& b = s2.terms();
    Complex r{0.0, 0.0};
    if (a.size() <= b.size()) {
        for (const auto& [occ, amp] : a) {
            auto it = b.find(occ);
            if (it != b.end()) r += std::conj(amp) * it->second;
        }
    } else {
        for (const auto& [occ, amp] : b) {
            auto it = a.find(occ);
            if (it != a.end()) r += std::conj(it->second) * amp;
        }
    }
    return r;
}

std::string state_to_json(const FockState& state) {
    nlohmann::json j;
    j["modes"] = nlohmann::json::array();
    for (const auto& m : state.registry().modes()) j["modes"].push_back(m.label);
    j["terms"] = nlohmann::json::array();
    for (const auto& [occ, amp] : state.terms()) {
        nlohmann::json t;
        t["occ"] = occ;
        t["re"] = amp.real();
        t["im"] = amp.imag();
        j["terms"].push_back(std::move(t));
    }
    return j.dump();
}

}  // namespace sagbell
