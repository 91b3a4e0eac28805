#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entsim/units.hpp"

namespace entsim {

struct WalkoffSpec {
    // exactly one of the two group-index representations must be set
    std::optional<std::pair<double, double>> group_indices; // (n_gH, n_gV)
    std::optional<double> delta_group_index;                // |n_gH - n_gV|

    Millimeters chip_length{0.0};
    Millimeters poled_length{0.0};
    double fiber_birefringence = 0.0;
    Picoseconds coherence_time{0.0};

    double delta_ng() const;
    void validate() const;
};

// L_eff = L - L_p/2: pairs are born at the center of the poled region.
Millimeters effective_length(const WalkoffSpec& spec);

// dtau = dn_g * L_eff / c
Picoseconds walkoff_delay(const WalkoffSpec& spec);

// L_f = delay * c / B
Meters compensation_fiber_length(Picoseconds delay, double birefringence);

// delay a fiber of given length imposes: B * L / c
Picoseconds fiber_delay(Meters length, double birefringence);

// Gaussian residual penalty exp(-dt^2 / (2 T_c^2))
double residual_indistinguishability(Picoseconds residual_delay, Picoseconds coherence_time);

struct BudgetRow {
    std::string quantity;
    double value;
    std::string unit;
};

struct WalkoffBudget {
    Millimeters effective_len;
    Picoseconds delay;
    Meters fiber_length;
    Picoseconds residual;
    double residual_factor;
    bool fiber_overridden;

    std::vector<BudgetRow> rows() const;
};

// Without an override the fiber is the derived compensating length and the
// residual is zero by definition (the fiber is *chosen* to cancel the delay).
// An explicit fiber length gets the residual computed numerically.
WalkoffBudget walkoff_budget(const WalkoffSpec& spec,
                             std::optional<Meters> fiber_override = std::nullopt);

} // namespace entsim
