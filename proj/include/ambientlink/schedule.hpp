#pragma once

#include <cstddef>
#include <vector>

namespace ambientlink {

// Bit k occupies slots 2k (reference, level 0) and 2k+1 (level bits[k] * rho1).
struct SlotSchedule {
    std::vector<int> bits;  // preamble first
    std::size_t preamble = 0;
    double T = 1.0;
    double rho1 = 0.0;

    std::size_t n_bits() const { return bits.size(); }
    std::size_t n_slots() const { return 2 * bits.size(); }
    double duration() const { return 4.0 * T * static_cast<double>(bits.size()); }
    double slot_start(std::size_t s) const { return 2.0 * T * static_cast<double>(s); }
    double slot_center(std::size_t s) const { return (2.0 * static_cast<double>(s) + 1.0) * T; }
    bool slot_on(std::size_t s) const { return s % 2 == 1 && bits[s / 2] != 0; }
    double im_rho(double t) const;
    double rate() const { return 1.0 / (4.0 * T); }
    double payload_rate() const;
};

SlotSchedule encode(const std::vector<int>& bits, double rho1, double T, const std::vector<int>& preamble);
// K reference-only bits: the unmodulated world on the same slot grid.
SlotSchedule unmodulated(std::size_t n_bits, double T);

}
