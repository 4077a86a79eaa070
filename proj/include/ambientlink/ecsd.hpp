#pragma once

#include <vector>

#include "ambientlink/media.hpp"
#include "ambientlink/record.hpp"
#include "ambientlink/schedule.hpp"
#include "ambientlink/spectrum.hpp"

namespace ambientlink {

struct EcsdSeries {
    std::vector<cplx> values;
    std::vector<double> centers;
    double omega = 0.0;

    std::size_t size() const { return values.size(); }
};

// Discretised double integral over the record grid: the pair (t - tau/2, t + tau/2) runs
// over sample pairs (i, i + l), with weight dt^2 phi_T(t_i + l dt/2 - tc) psi_T'(l dt) e^{i w l dt}.
cplx ecsd_at(const RecordView& rec, double omega, double t_center, const WindowSpec& windows);
cplx ecsd_at(const FieldRecord& rec, double omega, double t_center, const WindowSpec& windows);

double ecsd_psd_diff(const RecordView& rec, double omega, double t_center, const WindowSpec& windows);
double ecsd_psd_diff(const FieldRecord& rec, double omega, double t_center, const WindowSpec& windows);

EcsdSeries ecsd_series(const FieldRecord& rec, const SlotSchedule& schedule, const WindowSpec& windows, double omega0,
                       unsigned workers = 1);

// Time span [t_center - T - 4T', t_center + T + 4T'] that a window reads.
std::pair<double, double> ecsd_span(double t_center, const WindowSpec& windows);

}
