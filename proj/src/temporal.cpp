#include "entsim/temporal.hpp"

#include <cmath>
#include <stdexcept>

namespace entsim {

double WalkoffSpec::delta_ng() const {
    if (delta_group_index) return *delta_group_index;
    if (group_indices) return std::abs(group_indices->first - group_indices->second);
    throw std::invalid_argument("walkoff: no group-index representation set");
}

void WalkoffSpec::validate() const {
    if (group_indices.has_value() == delta_group_index.has_value())
        throw std::invalid_argument(
            "walkoff: exactly one of (group_index_h, group_index_v) and delta_group_index must be set");
    if (group_indices) {
        if (!(group_indices->first > 0.0) || !(group_indices->second > 0.0))
            throw std::invalid_argument("walkoff: group indices must be positive");
    } else if (!(*delta_group_index >= 0.0)) {
        throw std::invalid_argument("walkoff.delta_group_index must be nonnegative");
    }
    if (!(poled_length.value > 0.0))
        throw std::invalid_argument("walkoff.poled_length must be positive");
    if (!(chip_length.value >= poled_length.value))
        throw std::invalid_argument("walkoff.chip_length must be >= poled_length");
    if (!(fiber_birefringence > 0.0))
        throw std::invalid_argument("walkoff.fiber_birefringence must be positive");
    if (!(coherence_time.value > 0.0))
        throw std::invalid_argument("walkoff.coherence_time must be positive");
}

Millimeters effective_length(const WalkoffSpec& spec) {
    spec.validate();
    return Millimeters{spec.chip_length.value - 0.5 * spec.poled_length.value};
}

Picoseconds walkoff_delay(const WalkoffSpec& spec) {
    const Millimeters leff = effective_length(spec);
    return Picoseconds{spec.delta_ng() * leff.value / speed_of_light_mm_per_ps};
}

Meters compensation_fiber_length(Picoseconds delay, double birefringence) {
    if (!(birefringence > 0.0))
        throw std::invalid_argument("compensation_fiber_length: birefringence must be positive");
    return Meters{delay.value * 1e-12 * speed_of_light_m_per_s / birefringence};
}

Picoseconds fiber_delay(Meters length, double birefringence) {
    if (!(birefringence > 0.0))
        throw std::invalid_argument("fiber_delay: birefringence must be positive");
    return Picoseconds{birefringence * length.value / speed_of_light_m_per_s * 1e12};
}

double residual_indistinguishability(Picoseconds residual_delay, Picoseconds coherence_time) {
    if (!(coherence_time.value > 0.0))
        throw std::invalid_argument("residual_indistinguishability: coherence_time must be positive");
    const double x = residual_delay.value / coherence_time.value;
    return std::exp(-0.5 * x * x);
}

std::vector<BudgetRow> WalkoffBudget::rows() const {
    return {
        {"effective_length", effective_len.value, "mm"},
        {"polarization_walkoff_delay", delay.value, "ps"},
        {"compensation_fiber_length", fiber_length.value, "m"},
        {"compensated_residual_delay", residual.value, "ps"},
        {"residual_indistinguishability", residual_factor, "1"},
    };
}

WalkoffBudget walkoff_budget(const WalkoffSpec& spec, std::optional<Meters> fiber_override) {
    spec.validate();
    WalkoffBudget b;
    b.effective_len = effective_length(spec);
    b.delay = walkoff_delay(spec);
    b.fiber_overridden = fiber_override.has_value();
    if (fiber_override) {
        b.fiber_length = *fiber_override;
        b.residual = Picoseconds{b.delay.value -
                                 fiber_delay(b.fiber_length, spec.fiber_birefringence).value};
    } else {
        b.fiber_length = compensation_fiber_length(b.delay, spec.fiber_birefringence);
        b.residual = Picoseconds{0.0}; // exact by construction of the fiber length
    }
    b.residual_factor = residual_indistinguishability(b.residual, spec.coherence_time);
    return b;
}

} // namespace entsim
