#include "ambientlink/ecsd.hpp"

#include <cmath>
#include <sstream>

#include "ambientlink/error.hpp"
#include "ambientlink/parallel.hpp"

namespace ambientlink {

std::pair<double, double> ecsd_span(double t_center, const WindowSpec& windows)
{
    const double reach = windows.phi_half_width() + windows.psi_half_width();
    return {t_center - reach, t_center + reach};
}

cplx ecsd_at(const RecordView& rec, double omega, double t_center, const WindowSpec& windows)
{
    const double dt = rec.dt;
    const std::size_t n = rec.size();
    if (rec.rp.size() != n) fail(ErrorKind::argument, "ecsd: receiver series differ in length");
    const auto [need_lo, need_hi] = ecsd_span(t_center, windows);
    const double t_begin = rec.time(0);
    const double t_end = rec.time(n == 0 ? 0 : n - 1);
    if (n == 0 || need_lo < t_begin - 1e-9 * dt || need_hi > t_end + 1e-9 * dt) {
        std::ostringstream os;
        os << "ecsd: window [" << need_lo << ", " << need_hi << "] exceeds record [" << t_begin << ", " << t_end
           << "]; pad by " << std::max(t_begin - need_lo, need_hi - t_end);
        fail(ErrorKind::regime, os.str(), std::max(t_begin - need_lo, need_hi - t_end));
    }

    const long lmax = static_cast<long>(std::floor(windows.psi_half_width() / dt));
    const double T = windows.phi_half_width();
    // Sample indices whose half-grid midpoints can fall inside the phi support.
    const long off = static_cast<long>(rec.first);
    const double x_lo = (t_center - T - rec.t0) / dt;
    const double x_hi = (t_center + T - rec.t0) / dt;
    const long k_lo = std::max<long>(0, static_cast<long>(std::floor(x_lo)) - off - lmax - 1);
    const long k_hi = std::min<long>(static_cast<long>(n) - 1, static_cast<long>(std::ceil(x_hi)) - off + lmax + 1);

    // W[2i + l] = phi_T(t_i + l dt / 2 - tc), split by parity so both loops run at unit stride.
    const std::size_t span = static_cast<std::size_t>(k_hi - k_lo + 1);
    std::vector<double> w_even(span), w_odd(span);
    for (std::size_t j = 0; j < span; ++j) {
        const double t = rec.time(static_cast<std::size_t>(k_lo) + j) - t_center;
        w_even[j] = windows.phi(t);
        w_odd[j] = windows.phi(t + 0.5 * dt);
    }
    const double* a = rec.r.data();
    const double* b = rec.rp.data();

    cplx total = 0.0;
    for (long l = -lmax; l <= lmax; ++l) {
        const double tau = dt * static_cast<double>(l);
        const double psi = windows.psi(tau);
        if (psi == 0.0) continue;
        // l = 2m + p; the midpoint index 2i + l maps to (i + m) with parity p.
        const long m = (l >= 0) ? l / 2 : -((-l + 1) / 2);
        const long p = l - 2 * m;
        const double* w = p == 0 ? w_even.data() : w_odd.data();
        // i + m in [k_lo, k_hi], i and i + l in [0, n)
        const long i_lo = std::max({k_lo - m, 0L, -l});
        const long i_hi = std::min({k_hi - m, static_cast<long>(n) - 1, static_cast<long>(n) - 1 - l});
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        long i = i_lo;
        const double* wb = w + (m - k_lo);
        for (; i + 3 <= i_hi; i += 4) {
            s0 += a[i] * b[i + l] * wb[i];
            s1 += a[i + 1] * b[i + 1 + l] * wb[i + 1];
            s2 += a[i + 2] * b[i + 2 + l] * wb[i + 2];
            s3 += a[i + 3] * b[i + 3 + l] * wb[i + 3];
        }
        for (; i <= i_hi; ++i) s0 += a[i] * b[i + l] * wb[i];
        const double c = (s0 + s1) + (s2 + s3);
        total += std::polar(psi * c, omega * tau);
    }
    return total * (dt * dt);
}

cplx ecsd_at(const FieldRecord& rec, double omega, double t_center, const WindowSpec& windows)
{
    return ecsd_at(view_of(rec), omega, t_center, windows);
}

double ecsd_psd_diff(const RecordView& rec, double omega, double t_center, const WindowSpec& windows)
{
    std::vector<double> sum(rec.size()), diff(rec.size());
    for (std::size_t i = 0; i < rec.size(); ++i) {
        sum[i] = rec.r[i] + rec.rp[i];
        diff[i] = rec.r[i] - rec.rp[i];
    }
    const cplx s = ecsd_at(RecordView{rec.dt, rec.t0, sum, sum, rec.first}, omega, t_center, windows);
    const cplx d = ecsd_at(RecordView{rec.dt, rec.t0, diff, diff, rec.first}, omega, t_center, windows);
    return 0.25 * (s.real() - d.real());
}

double ecsd_psd_diff(const FieldRecord& rec, double omega, double t_center, const WindowSpec& windows)
{
    return ecsd_psd_diff(view_of(rec), omega, t_center, windows);
}

EcsdSeries ecsd_series(const FieldRecord& rec, const SlotSchedule& schedule, const WindowSpec& windows, double omega0,
                       unsigned workers)
{
    EcsdSeries out;
    out.omega = omega0;
    const std::size_t K2 = schedule.n_slots();
    out.values.resize(K2);
    out.centers.resize(K2);
    for (std::size_t k = 0; k < K2; ++k) out.centers[k] = schedule.slot_center(k);
    const RecordView v = view_of(rec);
    parallel_for(K2, workers, [&](std::size_t k) { out.values[k] = ecsd_at(v, omega0, out.centers[k], windows); });
    return out;
}

}
