#pragma once

namespace entsim {

// Strong unit tags for the walk-off arithmetic. Lengths and times cannot be
// mixed without an explicit conversion through the named constants below.
struct Millimeters { double value; };
struct Meters { double value; };
struct Picoseconds { double value; };

inline constexpr double speed_of_light_mm_per_ps = 0.299792458;
inline constexpr double speed_of_light_m_per_s = 299792458.0;

inline Meters to_meters(Millimeters x) { return Meters{x.value * 1e-3}; }
inline Millimeters to_millimeters(Meters x) { return Millimeters{x.value * 1e3}; }

} // namespace entsim
