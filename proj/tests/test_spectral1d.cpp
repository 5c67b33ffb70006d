#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "dles/spectral1d.hpp"

using namespace dles;

namespace {

SpectralField random_spectral(std::size_t band, std::uint64_t seed, std::size_t active) {
    RngStream rng(seed);
    std::vector<std::complex<double>> m(band + 1, 0.0);
    for (std::size_t k = 0; k <= std::min(band, active); ++k) {
        m[k] = {rng.normal(), k == 0 ? 0.0 : rng.normal()};
    }
    return SpectralField::from_modes(m);
}

double max_diff(const SpectralField& a, const SpectralField& b) {
    double d = 0.0;
    for (long k = -static_cast<long>(a.band()); k <= static_cast<long>(a.band()); ++k) {
        d = std::max(d, std::abs(a[k] - b[k]));
    }
    return d;
}

double max_abs(const SpectralField& a) {
    double d = 0.0;
    for (long k = -static_cast<long>(a.band()); k <= static_cast<long>(a.band()); ++k) {
        d = std::max(d, std::abs(a[k]));
    }
    return d;
}

} // namespace

TEST(SpectralField, PhysicalRoundTrip) {
    const SpectralField u = random_spectral(40, 1, 40);
    const SpectralField back = SpectralField::from_physical(u.to_physical());
    EXPECT_LT(max_diff(u, back), 1e-13);
    EXPECT_LT(back.hermitian_defect(), 1e-15);
}

TEST(SpectralField, SamplesMatchSeries) {
    const SpectralField u = random_spectral(7, 2, 7);
    const auto p = u.to_physical();
    const double n = static_cast<double>(u.points());
    for (std::size_t j = 0; j < p.size(); ++j) {
        std::complex<double> s = 0.0;
        for (long k = -7; k <= 7; ++k) {
            s += u[k] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k * static_cast<long>(j)) / n);
        }
        EXPECT_NEAR(p[j], s.real(), 1e-13);
    }
}

TEST(SpectralField, RejectsEvenSampleCount) {
    EXPECT_THROW(SpectralField::from_physical(std::vector<double>(8, 0.0)), Error);
    SpectralField u(3);
    EXPECT_THROW(u[4], Error);
}

TEST(SpectralFlux, MatchesPaddedConvolution) {
    const std::size_t band = 30;
    const std::size_t theta = default_theta(band);
    const double nu = 0.013;
    const SpectralField u = random_spectral(band, 3, band);
    const SpectralField r = spectral_flux(u, nu);
    const long t = static_cast<long>(theta);
    for (long k = -t; k <= t; ++k) {
        std::complex<double> conv = 0.0;
        for (long p = -t; p <= t; ++p) {
            const long q = k - p;
            if (q >= -t && q <= t) {
                conv += u[p] * u[q];
            }
        }
        const std::complex<double> expect = 0.5 * conv - nu * std::complex<double>(0.0, static_cast<double>(k)) * u[k];
        EXPECT_LT(std::abs(r[k] - expect), 1e-13) << "k=" << k;
    }
}

TEST(SpectralFlux, RejectsOversizedDealiasingBand) {
    const SpectralField u = random_spectral(10, 4, 10);
    EXPECT_THROW(spectral_flux(u, 0.1, 11), Error);
    EXPECT_NO_THROW(spectral_flux(u, 0.1, 10));
}

TEST(SpectralCutoff, ReturnsSmallerBand) {
    const SpectralField u = random_spectral(20, 5, 20);
    EXPECT_EQ(cutoff_filter(u, 8).band(), 8u);
    EXPECT_EQ(cutoff_filter(u, 50).band(), 20u);
    EXPECT_EQ(cutoff_filter(u, 8)[-8], u[-8]);
}

TEST(SpectralSfs, VanishesForBandLimitedField) {
    // the quadratic term of a field with |k| <= K/3 stays inside both dealiased bands
    const std::size_t kh = 300, k = 60;
    const SpectralField u = random_spectral(kh, 6, 20);
    const SpectralField tau = spectral_sfs(u, k, 5e-4);
    EXPECT_EQ(tau.band(), k);
    EXPECT_LT(max_abs(tau), 1e-13);
}

TEST(SpectralSfs, NonzeroForBroadbandField) {
    const SpectralField u = random_spectral(300, 7, 300);
    EXPECT_GT(max_abs(spectral_sfs(u, 60, 5e-4)), 1e-3);
}

TEST(SpectralSfs, ClosedLesTracksFilteredDns) {
    RngStream rng(11);
    const double nu = 5e-4;
    TimeState<SpectralField> dns{0.0, 0, spectral_burgers_init(400, rng)};
    std::vector<SpectralLes> les{make_spectral_les(40, true, dns), make_spectral_les(40, false, dns)};
    for (int s = 0; s < 100; ++s) {
        euler_step_spectral(dns, les, nu, cfl_dt_spectral(dns.state, nu));
    }
    const SpectralField ref = cutoff_filter(dns.state, 40);
    EXPECT_LE(relative_error(les[0].state.state, ref), 1e-12);
    EXPECT_GT(relative_error(les[1].state.state, ref), 1e-8);
    EXPECT_LT(les[0].state.state.hermitian_defect(), 1e-14);
}

TEST(SpectralSfs, StepRejectsMismatchedTimes) {
    RngStream rng(12);
    TimeState<SpectralField> dns{0.0, 0, spectral_burgers_init(50, rng)};
    std::vector<SpectralLes> les{make_spectral_les(10, true, dns)};
    les[0].state.step = 3;
    EXPECT_THROW(euler_step_spectral(dns, les, 1e-3, 1e-4), Error);
}

TEST(SpectralInit, EnergyHalf) {
    RngStream rng(13);
    const SpectralField u = spectral_burgers_init(3280, rng);
    EXPECT_NEAR(total(energy_spectrum(u)), 0.5, 1e-3);
    const auto p = u.to_physical();
    double s = 0.0;
    for (double x : p) {
        s += x * x;
    }
    EXPECT_NEAR(0.5 * s / static_cast<double>(p.size()), total(energy_spectrum(u)), 1e-13);
}
