#include "oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Poly multiply_linear(const Poly& poly, const LinearForm& form) {
    Poly out;
    for (const auto& [mono, coeff] : poly) {
        for (const auto& [mode, c] : form) {
            if (c == Complex{0.0, 0.0}) continue;
            Monomial m = mono;
            ++m[static_cast<size_t>(mode)];
            out[std::move(m)] += coeff * c;
        }
    }
    return out;
}

}  // namespace

Poly from_creations(int n_modes, const std::vector<int>& modes) {
    Poly p;
    Monomial mono(static_cast<size_t>(n_modes), 0);
    for (int m : modes) ++mono[static_cast<size_t>(m)];
    p.emplace(std::move(mono), Complex{1.0, 0.0});
    return p;
}

Poly substitute(const Poly& poly, const std::map<int, LinearForm>& forms) {
    Poly out;
    for (const auto& [mono, coeff] : poly) {
        // Rebuild the monomial factor by factor, substituting each creation
        // operator through its linear form.
        Poly acc;
        acc.emplace(Monomial(mono.size(), 0), coeff);
        for (size_t mode = 0; mode < mono.size(); ++mode) {
            int count = mono[mode];
            if (count == 0) continue;
            LinearForm form;
            auto it = forms.find(static_cast<int>(mode));
            if (it != forms.end())
                form = it->second;
            else
                form = {{static_cast<int>(mode), Complex{1.0, 0.0}}};
            for (int i = 0; i < count; ++i) acc = multiply_linear(acc, form);
        }
        for (const auto& [m, c] : acc) out[m] += c;
    }
    return out;
}

Poly apply_pair_unitary(const Poly& poly, const sagbell::Mat2& u, int m1, int m2) {
    std::map<int, LinearForm> forms;
    forms[m1] = {{m1, u.m[0][0]}, {m2, u.m[0][1]}};
    forms[m2] = {{m1, u.m[1][0]}, {m2, u.m[1][1]}};
    return substitute(poly, forms);
}

Poly apply_phase(const Poly& poly, int mode, double theta) {
    std::map<int, LinearForm> forms;
    forms[mode] = {{mode, std::exp(Complex{0.0, theta})}};
    return substitute(poly, forms);
}

Poly apply_element(const Poly& poly, const sagbell::OpticalElement& elem,
                   std::optional<double> phi_binding) {
    using namespace sagbell;
    return std::visit(
        [&](const auto& e) -> Poly {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BeamSplitterElem>) {
                Mat2 u = e.inverse ? beamsplitter_matrix_inverse() : beamsplitter_matrix();
                return apply_pair_unitary(poly, u, e.m1, e.m2);
            } else if constexpr (std::is_same_v<T, PhaseShiftElem>) {
                return apply_phase(poly, e.mode, e.theta);
            } else if constexpr (std::is_same_v<T, SagnacPhaseElem>) {
                double phi = e.phi ? *e.phi : phi_binding.value();
                Poly p = poly;
                for (int m : e.co_modes) p = apply_phase(p, m, +phi / 2.0);
                for (int m : e.counter_modes) p = apply_phase(p, m, -phi / 2.0);
                return p;
            } else {
                static_assert(std::is_same_v<T, RouteElem>);
                // in -> (through + i discard)/sqrt2; the mode displaced by the
                // relabeling maps onto the orthogonal combination.
                const Complex inv_sqrt2{1.0 / std::sqrt(2.0), 0.0};
                const Complex i_inv_sqrt2{0.0, 1.0 / std::sqrt(2.0)};
                std::map<int, LinearForm> forms;
                if (e.in == e.through) {
                    forms[e.in] = {{e.in, inv_sqrt2}, {e.discard, i_inv_sqrt2}};
                    forms[e.discard] = {{e.in, i_inv_sqrt2}, {e.discard, inv_sqrt2}};
                } else if (e.discard == e.in) {
                    forms[e.in] = {{e.through, inv_sqrt2}, {e.in, i_inv_sqrt2}};
                    forms[e.through] = {{e.through, i_inv_sqrt2}, {e.in, inv_sqrt2}};
                } else {
                    forms[e.in] = {{e.through, inv_sqrt2}, {e.discard, i_inv_sqrt2}};
                    forms[e.through] = {{e.in, Complex{1.0, 0.0}}};
                    forms[e.discard] = {{e.through, i_inv_sqrt2}, {e.discard, inv_sqrt2}};
                }
                return substitute(poly, forms);
            }
        },
        elem);
}

std::map<sagbell::OccupationVector, Complex> amplitudes(const Poly& poly) {
    std::map<sagbell::OccupationVector, Complex> out;
    for (const auto& [mono, coeff] : poly) {
        double factor = 1.0;
        for (int e : mono) factor *= std::sqrt(factorial(e));
        out[mono] += coeff * factor;
    }
    return out;
}

std::map<sagbell::OccupationVector, Complex> simulate(const sagbell::Circuit& circuit,
                                                      std::optional<double> phi_binding) {
    Poly p = from_creations(circuit.registry->size(), circuit.input_modes);
    // Normalize the input the same way make_state does.
    auto amps = amplitudes(p);
    double norm2 = 0.0;
    for (const auto& [occ, a] : amps) norm2 += std::norm(a);
    for (auto& [mono, c] : p) c /= std::sqrt(norm2);

    for (const auto& e : circuit.elements) p = apply_element(p, e, phi_binding);
    return amplitudes(p);
}

double max_amplitude_deviation(const sagbell::FockState& state,
                               const std::map<sagbell::OccupationVector, Complex>& expected) {
    double worst = 0.0;
    for (const auto& [occ, amp] : expected) {
        double d = std::abs(state.amplitude(occ) - amp);
        worst = std::max(worst, d);
    }
    for (const auto& [occ, amp] : state.terms()) {
        auto it = expected.find(occ);
        if (it == expected.end()) worst = std::max(worst, std::abs(amp));
    }
    return worst;
}

}  // namespace oracle
