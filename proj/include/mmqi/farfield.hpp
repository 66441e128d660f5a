#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "mmqi/basis.hpp"
#include "mmqi/collective.hpp"
#include "mmqi/errors.hpp"
#include "mmqi/one_body.hpp"
#include "mmqi/state.hpp"

namespace mmqi {

/// Far-field wavenumber of each flat mode (a-modes first, then b-modes).
struct PlaneWaveModes {
    std::vector<double> wavenumbers;
};

/// Tabulated normalized far-field density with extracted fringe extrema.
struct PatternSample {
    std::vector<double> xs;
    std::vector<double> ps;
    double p_max = 0.0;
    double p_min = 0.0;
    double x_at_max = 0.0;
    double x_at_min = 0.0;
    double nu = 0.0;  // (p_max - p_min) / (p_max + p_min)
    double period = 0.0;
    double window = 0.0;
    bool window_limited = false;  // incommensurate frequencies, finite window
};

// ---------------------------------------------------------------------------
// One-body density matrix

/// <c_m^dag c_n> of a pure sector state, computed as the Gram matrix of the
/// lowered vectors a_n|psi> on the (N-1)-particle sector. Hermitian and
/// positive semidefinite by construction, trace N.
inline Eigen::MatrixXcd one_body_dm(const StateVector& psi) {
    const FockBasis& basis = psi.basis();
    const int modes = basis.total_modes();
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(modes, modes);
    if (basis.particles() == 0) return g;

    const auto lower = FockBasis::enumerate(basis.particles() - 1, basis.modes_per_arm());
    Eigen::MatrixXcd lowered = Eigen::MatrixXcd::Zero(lower->dim(), modes);
    Occupation occ;
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        if (psi.amps()[i] == Complex(0.0, 0.0)) continue;
        for (int n = 0; n < modes; ++n) {
            if (basis.state(i)[n] == 0) continue;
            occ = basis.state(i);
            occ[n] -= 1;
            lowered(lower->rank(occ), n) +=
                std::sqrt(static_cast<double>(basis.state(i)[n])) * psi.amps()[i];
        }
    }
    g = lowered.adjoint() * lowered;
    return 0.5 * (g + g.adjoint()).eval();
}

inline Eigen::MatrixXcd one_body_dm(const DensityOperator& rho) {
    const FockBasis& basis = rho.basis();
    const int modes = basis.total_modes();
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(modes, modes);
    Occupation occ;
    for (std::size_t j = 0; j < basis.dim(); ++j) {
        const Occupation& col = basis.state(j);
        for (int n = 0; n < modes; ++n) {
            if (col[n] == 0) continue;
            g(n, n) += static_cast<double>(col[n]) * rho.matrix()(j, j);
            for (int m = 0; m < modes; ++m) {
                if (m == n) continue;
                occ = col;
                occ[n] -= 1;
                occ[m] += 1;
                const std::size_t i = basis.rank(occ);
                const double amp = std::sqrt(static_cast<double>(col[n]) * (col[m] + 1));
                g(m, n) += amp * rho.matrix()(j, i);
            }
        }
    }
    return 0.5 * (g + g.adjoint()).eval();
}

// ---------------------------------------------------------------------------
// Pattern tabulation

namespace detail {

/// One oscillatory contribution Re(coef * exp(i freq x)), freq > 0.
struct CosTerm {
    double freq;
    Complex coef;
};

inline double eval_pattern(double base, const std::vector<CosTerm>& terms, double x) {
    double p = base;
    for (const CosTerm& t : terms)
        p += t.coef.real() * std::cos(t.freq * x) - t.coef.imag() * std::sin(t.freq * x);
    return p;
}

/// Continued-fraction rational approximation of x = p/q with q <= max_den.
inline bool rationalize(double x, long max_den, double rel_tol, long& p_out, long& q_out) {
    long p_prev = 1, q_prev = 0;
    long p_cur = static_cast<long>(std::floor(x));
    long q_cur = 1;
    double frac = x - std::floor(x);
    for (int iter = 0; iter < 64; ++iter) {
        if (std::abs(x - static_cast<double>(p_cur) / q_cur) <= rel_tol * std::max(1.0, x)) {
            p_out = p_cur;
            q_out = q_cur;
            return true;
        }
        if (frac == 0.0) break;
        const double inv = 1.0 / frac;
        const long a = static_cast<long>(std::floor(inv));
        frac = inv - std::floor(inv);
        const long p_next = a * p_cur + p_prev;
        const long q_next = a * q_cur + q_prev;
        if (q_next > max_den) break;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
    }
    return false;
}

struct WindowInfo {
    double window;
    double period;
    bool limited;
};

/// Common period of the difference frequencies, when they are commensurate;
/// otherwise a long surrogate window flagged as window-limited.
inline WindowInfo resolve_window(std::vector<double> freqs, double requested) {
    std::sort(freqs.begin(), freqs.end());
    freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());
    if (freqs.empty()) {
        const double window = requested > 0.0 ? requested : 2.0 * M_PI;
        return WindowInfo{window, 0.0, false};
    }

    const double base = freqs.front();
    long lcm = 1;
    bool commensurate = true;
    for (double f : freqs) {
        long p = 0, q = 0;
        if (!rationalize(f / base, 4096, 1e-9, p, q)) {
            commensurate = false;
            break;
        }
        lcm = std::lcm(lcm, q);
        if (lcm > 1000000) {
            commensurate = false;
            break;
        }
    }

    if (commensurate) {
        const double period = 2.0 * M_PI * static_cast<double>(lcm) / base;
        if (requested > 0.0 && requested < period * (1.0 - 1e-12))
            throw WindowTooSmall("pattern: window " + std::to_string(requested) +
                                 " is shorter than the common period " + std::to_string(period));
        return WindowInfo{requested > 0.0 ? requested : period, period, false};
    }

    double min_gap = base;  // gap to zero frequency
    for (std::size_t i = 1; i < freqs.size(); ++i)
        min_gap = std::min(min_gap, freqs[i] - freqs[i - 1]);
    const double fallback = 100.0 * 2.0 * M_PI / min_gap;
    const double window = requested > 0.0 ? requested : fallback;
    return WindowInfo{window, window, true};
}

/// Quadratic refinement of a grid extremum; the pattern is re-evaluated at
/// the interpolated abscissa rather than trusting the parabola value.
inline void refine_extremum(double base, const std::vector<CosTerm>& terms, double x0, double h,
                            double& best_x, double& best_p, bool maximize) {
    const double pl = eval_pattern(base, terms, x0 - h);
    const double pc = eval_pattern(base, terms, x0);
    const double pr = eval_pattern(base, terms, x0 + h);
    const double denom = pl - 2.0 * pc + pr;
    best_x = x0;
    best_p = pc;
    if (std::abs(denom) < 1e-300) return;
    double dx = 0.5 * (pl - pr) / denom * h;
    dx = std::clamp(dx, -h, h);
    const double x_ref = x0 + dx;
    const double p_ref = eval_pattern(base, terms, x_ref);
    if (maximize ? p_ref >= pc : p_ref <= pc) {
        best_x = x_ref;
        best_p = p_ref;
    }
}

inline PatternSample make_sample(double base, const std::vector<CosTerm>& terms, long grid,
                                 double requested_window) {
    if (grid < 10000) throw InvalidArgs("pattern: grid must contain at least 10^4 points");
    std::vector<double> freqs;
    freqs.reserve(terms.size());
    for (const CosTerm& t : terms) freqs.push_back(t.freq);
    const WindowInfo info = resolve_window(std::move(freqs), requested_window);

    PatternSample sample;
    sample.period = info.period;
    sample.window = info.window;
    sample.window_limited = info.limited;
    sample.xs.resize(grid);
    sample.ps.resize(grid);
    const double h = info.window / static_cast<double>(grid);
    std::size_t imax = 0, imin = 0;
    for (long i = 0; i < grid; ++i) {
        const double x = i * h;
        const double p = eval_pattern(base, terms, x);
        sample.xs[i] = x;
        sample.ps[i] = p;
        if (p > sample.ps[imax]) imax = i;
        if (p < sample.ps[imin]) imin = i;
    }
    refine_extremum(base, terms, sample.xs[imax], h, sample.x_at_max, sample.p_max, true);
    refine_extremum(base, terms, sample.xs[imin], h, sample.x_at_min, sample.p_min, false);
    if (sample.p_min < -1e-10)
        throw NonPhysicalState("pattern: density dips below zero, state or modes inconsistent");
    sample.nu = (sample.p_max - sample.p_min) / (sample.p_max + sample.p_min);
    return sample;
}

/// Interference terms of p(x) = (1/N) sum_{mn} e^{i(k_n-k_m)x} <c_m^dag c_n>.
inline std::vector<CosTerm> terms_from_dm(const Eigen::MatrixXcd& g,
                                          const PlaneWaveModes& modes, double& base) {
    const int n_modes = static_cast<int>(g.rows());
    if (static_cast<int>(modes.wavenumbers.size()) != n_modes)
        throw DimMismatch("pattern: one wavenumber per flat mode required");
    for (double k : modes.wavenumbers)
        if (!std::isfinite(k)) throw InvalidArgs("pattern: wavenumbers must be finite");

    const double n_particles = g.trace().real();
    if (n_particles <= 0.0)
        throw InvalidArgs("pattern: state carries no particles");

    base = 1.0;
    std::map<double, Complex> merged;
    for (int m = 0; m < n_modes; ++m) {
        for (int n = m + 1; n < n_modes; ++n) {
            Complex coef = 2.0 * g(m, n) / n_particles;
            if (std::abs(coef) <= 1e-14) continue;
            double freq = modes.wavenumbers[n] - modes.wavenumbers[m];
            if (freq < 0.0) {
                freq = -freq;
                coef = std::conj(coef);
            }
            if (freq == 0.0) {
                base += coef.real();
            } else {
                merged[freq] += coef;
            }
        }
    }
    std::vector<CosTerm> terms;
    terms.reserve(merged.size());
    for (const auto& [freq, coef] : merged)
        if (std::abs(coef) > 1e-14) terms.push_back({freq, coef});
    return terms;
}

}  // namespace detail

/// Normalized far-field density of an arbitrary sector state expanded over
/// plane-wave mode functions, with visibility extraction.
template <typename State>
PatternSample pattern(const State& state, const PlaneWaveModes& modes, long grid = 200000,
                      double window = 0.0) {
    double base = 0.0;
    const std::vector<detail::CosTerm> terms =
        detail::terms_from_dm(one_body_dm(state), modes, base);
    return detail::make_sample(base, terms, grid, window);
}

/// Closed-form three-mode density at a point:
/// p(x) = 1 + z sqrt(zeta(1-zeta)) cos(2 dk x)
///          + sqrt(z(1-z)) (sqrt(zeta) cos((2k+dk)x) + sqrt(1-zeta) cos((2k-dk)x)).
inline double pattern_closed_form_threemode(double z, double zeta, double k, double dk,
                                            double x) {
    if (z < 0.0 || z > 1.0 || zeta < 0.0 || zeta > 1.0)
        throw RangeError("pattern_closed_form_threemode: z and zeta must lie in [0, 1]");
    return 1.0 + z * std::sqrt(zeta * (1.0 - zeta)) * std::cos(2.0 * dk * x) +
           std::sqrt(z * (1.0 - z)) * (std::sqrt(zeta) * std::cos((2.0 * k + dk) * x) +
                                       std::sqrt(1.0 - zeta) * std::cos((2.0 * k - dk) * x));
}

/// The closed-form curve tabulated with the same extraction machinery as
/// the generic pattern.
inline PatternSample pattern_closed_form_threemode_sample(double z, double zeta, double k,
                                                          double dk, long grid = 200000,
                                                          double window = 0.0) {
    if (z < 0.0 || z > 1.0 || zeta < 0.0 || zeta > 1.0)
        throw RangeError("pattern_closed_form_threemode: z and zeta must lie in [0, 1]");
    std::map<double, Complex> merged;
    auto add = [&merged](double freq, double coef) {
        if (coef == 0.0) return;
        merged[std::abs(freq)] += coef;
    };
    double base = 1.0;
    add(2.0 * dk, z * std::sqrt(zeta * (1.0 - zeta)));
    add(2.0 * k + dk, std::sqrt(z * (1.0 - z)) * std::sqrt(zeta));
    add(2.0 * k - dk, std::sqrt(z * (1.0 - z)) * std::sqrt(1.0 - zeta));
    std::vector<detail::CosTerm> terms;
    for (const auto& [freq, coef] : merged) {
        if (freq == 0.0) {
            base += coef.real();
        } else if (std::abs(coef) > 1e-14) {
            terms.push_back({freq, coef});
        }
    }
    return detail::make_sample(base, terms, grid, window);
}

// ---------------------------------------------------------------------------
// Witnesses built on the pattern

namespace detail {

template <typename State>
double eta_squared_impl(const State& state) {
    const FockBasis& basis = state.basis();
    if (basis.particles() == 0)
        throw InvalidArgs("eta_squared: state carries no particles");
    const SparseHermitian jz = one_body_operator(
        basis, collective_coeff(basis.modes_per_arm(), Eigen::Vector3d::UnitZ()));
    const double mean = expectation(jz, state);
    double second;
    if constexpr (std::is_same_v<State, StateVector>) {
        second = jz.apply(state.amps()).squaredNorm();
    } else {
        second = jz.trace_product(jz.apply(state.matrix())).real();
    }
    return 4.0 / basis.particles() * (second - mean * mean);
}

}  // namespace detail

/// Arm-population fluctuations normalized to shot noise:
/// eta^2 = (4/N) Var(Jz) between the arm totals.
inline double eta_squared(const StateVector& psi) { return detail::eta_squared_impl(psi); }
inline double eta_squared(const DensityOperator& rho) { return detail::eta_squared_impl(rho); }

/// The operational squeezing estimate eta^2 / nu^2. Reliable only when each
/// arm is known to hold a single mode; with hidden internal structure the
/// visibility picks up same-arm interference and the ratio can flag
/// entanglement where none exists.
inline double operational_xi(double eta2, double nu2) {
    if (nu2 <= 0.0)
        throw ZeroVisibility("operational_xi: visibility must be positive");
    return eta2 / nu2;
}

/// Mean-field witness from sampled relative phases:
/// xi_S^2 = xi_N^2 / (<cos phi>^2 + <sin phi>^2).
inline double meanfield_xi_s(const std::vector<double>& phase_samples, double xi_n2) {
    if (phase_samples.empty())
        throw InvalidArgs("meanfield_xi_s: needs at least one phase sample");
    double c = 0.0, s = 0.0;
    for (double phi : phase_samples) {
        c += std::cos(phi);
        s += std::sin(phi);
    }
    c /= static_cast<double>(phase_samples.size());
    s /= static_cast<double>(phase_samples.size());
    const double denom = c * c + s * s;
    if (denom <= 1e-12)
        throw PhaseFullySmeared("meanfield_xi_s: phase distribution has no mean direction");
    return xi_n2 / denom;
}

}  // namespace mmqi
