#pragma once

// Time integration and random initial conditions.
//
// DNS-aided runs advance a fine (DNS) state and any number of coarse (LES)
// states in lockstep with forward Euler and one shared time step. Each LES is
// closed with a sub-filter stress evaluated from the current DNS state.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <tuple>
#include <vector>

#include "dles/fluxes.hpp"
#include "dles/sfs.hpp"
#include "dles/spectrum.hpp"

namespace dles {

/// Raised when a state stops being finite.
class NumericalError : public Error {
  public:
    NumericalError(const std::string& what, long step)
        : Error(what + " became non-finite at step " + std::to_string(step)), step_(step) {}
    /// Same failure, prefixed with the run it happened in.
    NumericalError(const std::string& context, const NumericalError& inner)
        : Error(context + ": " + inner.what()), step_(inner.step()) {}
    long step() const { return step_; }

  private:
    long step_;
};

/// Counter-based generator: value n of stream `seed` is a SplitMix64 hash of
/// (seed, n), so sequences are identical on every platform and any value can
/// be regenerated without replaying the stream.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    static std::uint64_t hash(std::uint64_t seed, std::uint64_t n) {
        std::uint64_t z = seed * 0xD1B54A32D192ED03ull + (n + 1) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return hash(seed_, counter_++); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal by Box-Muller; consumes two values per sample.
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

template <class State>
struct TimeState {
    double t = 0.0;
    long step = 0;
    State state;
};

inline double max_abs_value(const Field1D& u) {
    double m = 0.0;
    for (double x : u.values()) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

inline double max_abs_value(const VectorField& v) {
    double m = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (double x : v[i].values()) {
            m = std::max(m, std::abs(x));
        }
    }
    return m;
}

/// C min(h / max|v|, h^2 / nu); the convective bound drops out for v = 0.
inline double cfl_dt_burgers(const Field1D& v, double nu, double h, double c = 0.4) {
    const double vmax = max_abs_value(v);
    const double visc = h * h / nu;
    return c * (vmax > 0.0 ? std::min(h / vmax, visc) : visc);
}

/// C min(h / max|v|, h^2 / (6 nu)).
inline double cfl_dt_ns(const VectorField& v, double nu, double h, double c = 0.15) {
    const double vmax = max_abs_value(v);
    const double visc = h * h / (6.0 * nu);
    return c * (vmax > 0.0 ? std::min(h / vmax, visc) : visc);
}

namespace detail {

inline void require_finite(const Field1D& u, long step, const std::string& what) {
    if (!u.all_finite()) {
        throw NumericalError(what, step);
    }
}

inline void require_finite(const VectorField& v, long step, const std::string& what) {
    if (!v.all_finite()) {
        throw NumericalError(what, step);
    }
}

template <class A, class B>
void require_same_time(const TimeState<A>& dns, const TimeState<B>& les) {
    if (dns.t != les.t || dns.step != les.step) {
        throw Error("euler step: DNS and LES states are not at the same time");
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Burgers

struct BurgersLes {
    GridPair pair;
    ClosureKind kind;
    TimeState<Field1D> state;
};

/// Coarse LES initialized with the filtered DNS field.
inline BurgersLes make_burgers_les(const GridPair& pair, ClosureKind kind, const TimeState<Field1D>& dns) {
    return {pair, kind, {dns.t, dns.step, twogrid_filter_1d(pair, dns.state)}};
}

/// One forward Euler step of the DNS and every LES:
///   v <- v - dt delta^h r^h(v)
///   w <- w - dt delta^H (r^H(w) + m(v))
inline void euler_step_burgers(TimeState<Field1D>& dns, std::vector<BurgersLes>& les, const BurgersParams& p,
                               double dt) {
    const Field1D rh = burgers_flux(dns.state, p);
    std::map<std::size_t, Field1D> coarse_flux_of_vbar;
    for (auto& l : les) {
        detail::require_same_time(dns, l.state);
        Field1D flux = burgers_flux(l.state.state, p);
        if (l.kind != ClosureKind::no_model) {
            auto it = coarse_flux_of_vbar.find(l.pair.n_coarse);
            if (it == coarse_flux_of_vbar.end()) {
                it = coarse_flux_of_vbar.emplace(l.pair.n_coarse, burgers_flux(twogrid_filter_1d(l.pair, dns.state), p))
                         .first;
            }
            flux += burgers_sfs_from_flux(l.pair, rh, it->second, l.kind);
        }
        l.state.state.axpy(-dt, diff_1d(flux));
    }
    dns.state.axpy(-dt, diff_1d(rh));
    dns.t += dt;
    ++dns.step;
    detail::require_finite(dns.state, dns.step, "DNS velocity");
    for (auto& l : les) {
        l.state.t = dns.t;
        l.state.step = dns.step;
        detail::require_finite(l.state.state, l.state.step, "LES velocity (" + to_string(l.kind) + ")");
    }
}

/// Single-LES form.
inline void euler_step_pair(TimeState<Field1D>& dns, BurgersLes& les, const BurgersParams& p, double dt) {
    std::vector<BurgersLes> one{std::move(les)};
    euler_step_burgers(dns, one, p, dt);
    les = std::move(one.front());
}

// ---------------------------------------------------------------------------
// Navier-Stokes

struct NSLes {
    GridPair pair;
    VectorFilter filter;
    ClosureKind kind;
    TimeState<VectorField> state;
};

/// Advances one DNS with many LES. Coarse Poisson solvers are created once per
/// coarse grid size, and closure terms shared between LES are computed once
/// per step.
class NSLockstep {
  public:
    NSLockstep(const Grid3D& fine, const NSParams& p) : fine_(fine), params_(p) {}

    const PoissonSolver3D& fine_solver() const { return fine_; }
    const NSParams& params() const { return params_; }

    const PoissonSolver3D& coarse_solver(const GridPair& pair) {
        auto it = coarse_.find(pair.n_coarse);
        if (it == coarse_.end()) {
            it = coarse_.emplace(pair.n_coarse, std::make_unique<PoissonSolver3D>(pair.coarse_3d())).first;
        }
        return *it->second;
    }

    NSLes make_les(const GridPair& pair, VectorFilter filter, ClosureKind kind, const TimeState<VectorField>& dns) {
        check_pair(pair);
        return {pair, filter, kind, {dns.t, dns.step, filter_vector(pair, coarse_solver(pair), dns.state, filter)}};
    }

    void step(TimeState<VectorField>& dns, std::vector<NSLes>& les, double dt) {
        const TensorField rh = ns_projected_stress(fine_, dns.state, params_);
        std::map<std::pair<std::size_t, VectorFilter>, TensorField> r_coarse;
        std::map<std::tuple<std::size_t, VectorFilter, ClosureKind>, TensorField> first_terms;

        for (auto& l : les) {
            detail::require_same_time(dns, l.state);
            check_pair(l.pair);
            const PoissonSolver3D& cs = coarse_solver(l.pair);
            TensorField stress = ns_projected_stress(cs, l.state.state, params_);
            if (l.kind != ClosureKind::no_model) {
                const auto key = std::make_pair(l.pair.n_coarse, l.filter);
                auto rc = r_coarse.find(key);
                if (rc == r_coarse.end()) {
                    const VectorField vbar = filter_vector(l.pair, cs, dns.state, l.filter);
                    rc = r_coarse.emplace(key, ns_projected_stress(cs, vbar, params_)).first;
                }
                const ClosureKind base = l.kind == ClosureKind::swap_sym ? ClosureKind::swap : l.kind;
                const auto fkey = std::make_tuple(l.pair.n_coarse, l.filter, base);
                auto ft = first_terms.find(fkey);
                if (ft == first_terms.end()) {
                    ft = first_terms.emplace(fkey, sfs_first_term(l.pair, &cs, rh, l.filter, base)).first;
                }
                TensorField tau = ft->second;
                tau -= rc->second;
                stress += l.kind == ClosureKind::swap_sym ? symmetrize(tau) : tau;
            }
            l.state.state.axpy(-dt, tensor_divergence(stress));
        }
        dns.state.axpy(-dt, tensor_divergence(rh));
        dns.t += dt;
        ++dns.step;
        detail::require_finite(dns.state, dns.step, "DNS velocity");
        for (auto& l : les) {
            l.state.t = dns.t;
            l.state.step = dns.step;
            detail::require_finite(l.state.state, l.state.step,
                                   "LES velocity (" + to_string(l.filter) + ", " + to_string(l.kind) + ")");
        }
    }

  private:
    void check_pair(const GridPair& pair) const {
        if (pair.n_fine != fine_.grid().n_points || pair.length != fine_.grid().length) {
            throw Error("NSLockstep: grid pair does not match the DNS grid");
        }
    }

    PoissonSolver3D fine_;
    NSParams params_;
    std::map<std::size_t, std::unique_ptr<PoissonSolver3D>> coarse_;
};

// ---------------------------------------------------------------------------
// Runge-Kutta

namespace detail {

inline void add_scaled(double& a, double s, const double& b) { a += s * b; }
template <class S>
void add_scaled(S& a, double s, const S& b) {
    a.axpy(s, b);
}

} // namespace detail

/// Wray's low-storage third-order scheme,
///   u_k = u_{k-1} + dt (a_k f(u_{k-1}) + b_k f(u_{k-2})),
/// with a = (8/15, 5/12, 3/4), b = (0, -17/60, -5/12) and the projector
/// applied after every stage.
template <class State, class Rhs, class Projector>
State rk3_wray_step(const State& u, double dt, Rhs&& rhs, Projector&& project) {
    constexpr double a[3] = {8.0 / 15.0, 5.0 / 12.0, 3.0 / 4.0};
    constexpr double b[3] = {0.0, -17.0 / 60.0, -5.0 / 12.0};
    State cur = u;
    State prev_rhs{};
    for (int k = 0; k < 3; ++k) {
        State f = rhs(cur);
        detail::add_scaled(cur, dt * a[k], f);
        if (k > 0) {
            detail::add_scaled(cur, dt * b[k], prev_rhs);
        }
        cur = project(cur);
        prev_rhs = std::move(f);
    }
    return cur;
}

template <class State, class Rhs>
State rk3_wray_step(const State& u, double dt, Rhs&& rhs) {
    return rk3_wray_step(u, dt, std::forward<Rhs>(rhs), [](const State& s) { return s; });
}

/// RK3 step of the projected Navier-Stokes equations.
inline VectorField ns_rk3_step(const PoissonSolver3D& s, const VectorField& v, const NSParams& p, double dt) {
    return rk3_wray_step(
        v, dt, [&](const VectorField& x) { return ns_rhs(s, x, p); },
        [&](const VectorField& x) { return project_vector(s, x); });
}

// ---------------------------------------------------------------------------
// Initial conditions

struct BurgersInitOptions {
    double k0 = 10.0;
    /// Rescale so that sum_{k > 0} |v_hat_k|^2 = 1/2 exactly instead of relying
    /// on the analytic amplitude.
    bool exact_rescale = false;
};

/// Positive-mode coefficients v_hat_k, k = 0 .. N/2, of the Burgers initial
/// condition: a (k/k0)^2 exp(-(k/k0)^2 / 2 + 2 pi i eps_k), eps_k ~ U(0, 1).
inline std::vector<std::complex<double>> burgers_init_modes(std::size_t n, RngStream& rng,
                                                            const BurgersInitOptions& opt = {}) {
    const double k0 = opt.k0;
    const double a = 2.0 / std::sqrt(3.0 * k0 * std::sqrt(std::numbers::pi));
    std::vector<std::complex<double>> vh(n / 2 + 1, 0.0);
    double energy = 0.0;
    for (std::size_t k = 1; k < vh.size(); ++k) {
        const double eps = rng.uniform();
        const double s = static_cast<double>(k) / k0;
        const double amp = a * s * s * std::exp(-0.5 * s * s);
        vh[k] = std::polar(amp, 2.0 * std::numbers::pi * eps);
        energy += amp * amp;
    }
    if (opt.exact_rescale && energy > 0.0) {
        const double f = std::sqrt(0.5 / energy);
        for (auto& z : vh) {
            z *= f;
        }
    }
    return vh;
}

/// u_j = sum_{k in Z} v_hat_k exp(2 pi i k j / N) with v_hat_{-k} = conj(v_hat_k).
inline Field1D burgers_init(const Grid1D& g, RngStream& rng, const BurgersInitOptions& opt = {}) {
    auto vh = burgers_init_modes(g.n_points, rng, opt);
    if (g.n_points % 2 == 0) {
        // the Nyquist coefficient stands for itself only
        vh.back() = 0.0;
    }
    const RealFft fft({static_cast<int>(g.n_points)});
    Field1D u(g, Stagger::center());
    fft.inverse(vh.data(), u.data());
    return u;
}

/// kappa^4 exp(-2 (kappa / kappa0)^2).
inline std::function<double(double)> ns_init_profile(double kappa0 = 5.0) {
    return [kappa0](double k) {
        const double s = k / kappa0;
        return k * k * k * k * std::exp(-2.0 * s * s);
    };
}

/// Rescales every shell of v so that its energy equals profile(kappa). Shells
/// with no energy are left at zero.
inline VectorField shape_spectrum(const VectorField& v, const std::function<double(double)>& profile) {
    const std::size_t n = v.n_points();
    const RealFft fft({static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)});
    std::array<std::vector<std::complex<double>>, 3> vh;
    for (int i = 0; i < 3; ++i) {
        vh[i].resize(fft.complex_size());
        fft.forward(v[i].data(), vh[i].data());
    }
    const double norm = 1.0 / static_cast<double>(fft.real_size());
    std::vector<double> shell_energy(max_shell(n, 3) + 1, 0.0);
    for_each_rfft_mode(n, [&](std::size_t lin, const std::array<long, 3>& k, double w) {
        double e = 0.0;
        for (int i = 0; i < 3; ++i) {
            e += std::norm(vh[i][lin] * norm);
        }
        shell_energy[shell_of(mode_norm(k))] += 0.5 * w * e;
    });
    std::vector<double> scale(shell_energy.size(), 0.0);
    for (std::size_t s = 0; s < scale.size(); ++s) {
        if (shell_energy[s] > 0.0) {
            scale[s] = std::sqrt(profile(static_cast<double>(s)) / shell_energy[s]);
        }
    }
    VectorField out(v.grid());
    for (int i = 0; i < 3; ++i) {
        for_each_rfft_mode(n, [&](std::size_t lin, const std::array<long, 3>& k, double) {
            vh[i][lin] *= scale[shell_of(mode_norm(k))] * norm;
        });
        fft.inverse(vh[i].data(), out[i].data());
    }
    return out;
}

/// Random divergence-free field with energy 1/2 and a prescribed spectrum:
/// sample normals, project, shape the shells, reproject, rescale.
inline VectorField ns_init(const PoissonSolver3D& s, RngStream& rng, double kappa0 = 5.0) {
    VectorField v(s.grid());
    for (int i = 0; i < 3; ++i) {
        for (auto& x : v[i].values()) {
            x = rng.normal();
        }
    }
    v = project_vector(s, v);
    v = shape_spectrum(v, ns_init_profile(kappa0));
    v = project_vector(s, v);
    const double e = kinetic_energy(v);
    if (e > 0.0) {
        v *= std::sqrt(0.5 / e);
    }
    return v;
}

} // namespace dles
