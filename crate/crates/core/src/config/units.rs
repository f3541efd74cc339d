//! Parsing of dimensional quantities written as `"value unit"` strings.
//! Inputs in atoms/m³ or sites/m³ are divided by the Avogadro constant so
//! every concentration is mol/m³ internally; eV converts at 96485.332 J/mol.

use crate::constants::{AVOGADRO, EV_PER_MOL};

/// Physical dimension expected for a config entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Dimensionless,
    Length,
    Time,
    Temperature,
    Pressure,
    EnergyPerMole,
    Diffusivity,
    /// mol/m³ internally; accepts atoms/m³ and sites/m³.
    Concentration,
    MolarVolume,
    StressIntensity,
    Frequency,
    HeatingRate,
    /// mol/(m² s) surface reaction constants.
    SurfaceRate,
    Velocity,
    /// 1/m² dislocation densities.
    AreaDensity,
}

impl Unit {
    fn conversions(&self) -> &'static [(&'static str, f64)] {
        match self {
            Unit::Dimensionless => &[("-", 1.0), ("1", 1.0)],
            Unit::Length => &[
                ("m", 1.0),
                ("mm", 1e-3),
                ("um", 1e-6),
                ("µm", 1e-6),
                ("nm", 1e-9),
            ],
            Unit::Time => &[("s", 1.0), ("min", 60.0), ("h", 3600.0)],
            Unit::Temperature => &[("K", 1.0)],
            Unit::Pressure => &[
                ("Pa", 1.0),
                ("kPa", 1e3),
                ("MPa", 1e6),
                ("GPa", 1e9),
            ],
            Unit::EnergyPerMole => &[
                ("J/mol", 1.0),
                ("kJ/mol", 1e3),
                ("eV", EV_PER_MOL),
            ],
            Unit::Diffusivity => &[("m^2/s", 1.0), ("m2/s", 1.0)],
            Unit::Concentration => &[
                ("mol/m^3", 1.0),
                ("mol/m3", 1.0),
                ("atoms/m^3", 1.0 / AVOGADRO),
                ("atoms/m3", 1.0 / AVOGADRO),
                ("sites/m^3", 1.0 / AVOGADRO),
                ("sites/m3", 1.0 / AVOGADRO),
            ],
            Unit::MolarVolume => &[("m^3/mol", 1.0), ("m3/mol", 1.0)],
            Unit::StressIntensity => &[
                ("Pa*m^0.5", 1.0),
                ("Pa*sqrt(m)", 1.0),
                ("MPa*m^0.5", 1e6),
                ("MPa*sqrt(m)", 1e6),
            ],
            Unit::Frequency => &[("1/s", 1.0), ("s^-1", 1.0), ("Hz", 1.0)],
            Unit::HeatingRate => &[("K/s", 1.0), ("K/min", 1.0 / 60.0)],
            Unit::SurfaceRate => &[
                ("mol/m^2/s", 1.0),
                ("mol/(m^2*s)", 1.0),
                ("mol/m2/s", 1.0),
            ],
            Unit::Velocity => &[("m/s", 1.0)],
            Unit::AreaDensity => &[("1/m^2", 1.0), ("m^-2", 1.0), ("1/m2", 1.0)],
        }
    }

    pub fn expected(&self) -> String {
        self.conversions()
            .iter()
            .map(|(u, _)| *u)
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Parses `"1.27e-8 m^2/s"`-style strings. Dimensionless quantities accept a
/// bare number. Celsius temperatures (`degC`) convert additively.
pub fn parse_quantity(text: &str, unit: Unit) -> Result<f64, String> {
    let trimmed = text.trim();
    let (value_str, unit_str) = match trimmed.split_once(char::is_whitespace) {
        Some((v, u)) => (v, u.trim()),
        None => (trimmed, ""),
    };
    let value: f64 = value_str
        .parse()
        .map_err(|_| format!("`{value_str}` is not a number"))?;
    if unit_str.is_empty() {
        if unit == Unit::Dimensionless {
            return Ok(value);
        }
        return Err(format!(
            "missing unit (expected one of: {})",
            unit.expected()
        ));
    }
    if unit == Unit::Temperature && unit_str == "degC" {
        return Ok(value + 273.15);
    }
    for (u, factor) in unit.conversions() {
        if *u == unit_str {
            return Ok(value * factor);
        }
    }
    Err(format!(
        "unit `{unit_str}` not valid here (expected one of: {})",
        unit.expected()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn common_conversions() {
        assert_relative_eq!(parse_quantity("10 um", Unit::Length).unwrap(), 1e-5);
        assert_relative_eq!(parse_quantity("207 GPa", Unit::Pressure).unwrap(), 207e9);
        assert_relative_eq!(parse_quantity("60 kJ/mol", Unit::EnergyPerMole).unwrap(), 60e3);
        assert_relative_eq!(
            parse_quantity("0.2 eV", Unit::EnergyPerMole).unwrap(),
            0.2 * EV_PER_MOL
        );
        assert_relative_eq!(
            parse_quantity("89.7 MPa*m^0.5", Unit::StressIntensity).unwrap(),
            89.7e6
        );
        assert_relative_eq!(
            parse_quantity("50 K/min", Unit::HeatingRate).unwrap(),
            50.0 / 60.0
        );
        // concentrations divide by Avogadro
        let c = parse_quantity("2.084e21 atoms/m^3", Unit::Concentration).unwrap();
        assert_relative_eq!(c, 3.461e-3, max_relative = 1e-3);
    }

    #[test]
    fn celsius_matches_kelvin() {
        let a = parse_quantity("300 K", Unit::Temperature).unwrap();
        let b = parse_quantity("26.85 degC", Unit::Temperature).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn bad_inputs_are_reported() {
        assert!(parse_quantity("fast", Unit::Time).is_err());
        assert!(parse_quantity("3 parsec", Unit::Length).is_err());
        assert!(parse_quantity("3", Unit::Length).is_err());
        // dimensionless accepts bare numbers
        assert_eq!(parse_quantity("0.3", Unit::Dimensionless).unwrap(), 0.3);
    }
}
