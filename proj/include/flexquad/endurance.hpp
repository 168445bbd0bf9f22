#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flexquad/error.hpp"

namespace flexquad {

struct BatterySpec {
  double capacity_mah = 1800.0;
  int cell_count = 4;
  double nominal_voltage = 14.8;

  void validate() const {
    if (!(capacity_mah > 0.0)) throw DomainError("capacity must be positive");
  }
};

/// Flight time in minutes from mean electrical consumption.
inline double flight_time_min(const BatterySpec& battery,
                              double mean_current_ma) {
  battery.validate();
  if (!(mean_current_ma > 0.0))
    throw DomainError("mean current must be positive");
  return 60.0 * battery.capacity_mah / mean_current_ma;
}

/// Time the servos can hold the closing torque, in minutes.
inline double inspection_time_min(const BatterySpec& battery,
                                  double servo_steady_torque_kgcm,
                                  double torque_to_current_ma_per_kgcm) {
  battery.validate();
  if (!(servo_steady_torque_kgcm > 0.0))
    throw DomainError("steady torque must be positive");
  if (!(torque_to_current_ma_per_kgcm > 0.0))
    throw DomainError("torque-to-current factor must be positive");
  const double current = torque_to_current_ma_per_kgcm * servo_steady_torque_kgcm;
  return 60.0 * battery.capacity_mah / current;
}

struct EnduranceInput {
  double rho_tpu = 0.0;
  std::optional<double> mean_current_ma;        ///< hover consumption
  std::optional<double> steady_torque_kgcm;     ///< closing torque U(inf)
  std::optional<double> specific_strength_knm_kg; ///< reference data, carried through
};

struct EnduranceReport {
  double rho_tpu = 0.0;
  std::optional<double> flight_time_min;
  std::optional<double> inspection_time_min;
  std::optional<double> specific_strength_knm_kg;
  std::string error; ///< empty on success
};

/**
 * One endurance report per infill rate. Missing consumption or torque
 * data for a rho is reported as absent rather than fabricated.
 */
inline std::vector<EnduranceReport> endurance_sweep(
    const std::vector<EnduranceInput>& inputs, const BatterySpec& flight_battery,
    const BatterySpec& servo_battery, double torque_to_current_ma_per_kgcm) {
  std::vector<EnduranceReport> reports;
  reports.reserve(inputs.size());
  for (const auto& in : inputs) {
    EnduranceReport r;
    r.rho_tpu = in.rho_tpu;
    r.specific_strength_knm_kg = in.specific_strength_knm_kg;
    try {
      if (in.mean_current_ma)
        r.flight_time_min = flight_time_min(flight_battery, *in.mean_current_ma);
      if (in.steady_torque_kgcm)
        r.inspection_time_min = inspection_time_min(
            servo_battery, *in.steady_torque_kgcm,
            torque_to_current_ma_per_kgcm);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    reports.push_back(r);
  }
  return reports;
}

} // namespace flexquad
