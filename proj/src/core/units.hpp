#pragma once

// All internal computation is SI (Pa, m, s, m^3/s, Pa*s). Field units
// (bar, day, mD, cP, m^3/day) appear only at I/O boundaries.

namespace koopflow::units {

inline constexpr double bar = 1.0e5;             // Pa
inline constexpr double milli_darcy = 9.869233e-16;  // m^2
inline constexpr double day = 86400.0;           // s
inline constexpr double centipoise = 1.0e-3;     // Pa*s

inline constexpr double pa_from_bar(double v) { return v * bar; }
inline constexpr double bar_from_pa(double v) { return v / bar; }
inline constexpr double m2_from_md(double v) { return v * milli_darcy; }
inline constexpr double md_from_m2(double v) { return v / milli_darcy; }
inline constexpr double s_from_day(double v) { return v * day; }
inline constexpr double day_from_s(double v) { return v / day; }
inline constexpr double pas_from_cp(double v) { return v * centipoise; }
inline constexpr double m3s_from_m3day(double v) { return v / day; }
inline constexpr double m3day_from_m3s(double v) { return v * day; }
inline constexpr double per_pa_from_per_bar(double v) { return v / bar; }

}  // namespace koopflow::units
