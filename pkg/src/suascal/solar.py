"""Solar geometry from day-of-year and UTC time.

Uses the Spencer (1971) Fourier expansions for declination and the equation
of time, which are accurate to a few hundredths of a degree -- plenty for
radiative-transfer path geometry.  No year is involved; day-of-year plus
clock time fully determine the geometry at this accuracy.
"""

from __future__ import annotations

import math


def _fractional_year(day_of_year: float, utc_hours: float) -> float:
    return 2.0 * math.pi / 365.0 * (day_of_year - 1 + (utc_hours - 12.0) / 24.0)


def solar_declination_deg(day_of_year: float, utc_hours: float = 12.0) -> float:
    """Solar declination in degrees."""
    g = _fractional_year(day_of_year, utc_hours)
    decl = (0.006918
            - 0.399912 * math.cos(g) + 0.070257 * math.sin(g)
            - 0.006758 * math.cos(2 * g) + 0.000907 * math.sin(2 * g)
            - 0.002697 * math.cos(3 * g) + 0.00148 * math.sin(3 * g))
    return math.degrees(decl)


def equation_of_time_minutes(day_of_year: float,
                             utc_hours: float = 12.0) -> float:
    """Equation of time in minutes (apparent minus mean solar time)."""
    g = _fractional_year(day_of_year, utc_hours)
    return 229.18 * (0.000075
                     + 0.001868 * math.cos(g) - 0.032077 * math.sin(g)
                     - 0.014615 * math.cos(2 * g) - 0.040849 * math.sin(2 * g))


def solar_zenith_deg(day_of_year: float, utc_hours: float,
                     latitude_deg: float, longitude_west_deg: float) -> float:
    """Solar zenith angle in degrees (may exceed 90 when the sun is down).

    ``longitude_west_deg`` is positive west of Greenwich.
    """
    eqtime = equation_of_time_minutes(day_of_year, utc_hours)
    true_solar_minutes = utc_hours * 60.0 + eqtime - 4.0 * longitude_west_deg
    hour_angle = math.radians(true_solar_minutes / 4.0 - 180.0)
    lat = math.radians(latitude_deg)
    decl = math.radians(solar_declination_deg(day_of_year, utc_hours))
    cos_zenith = (math.sin(lat) * math.sin(decl)
                  + math.cos(lat) * math.cos(decl) * math.cos(hour_angle))
    cos_zenith = min(1.0, max(-1.0, cos_zenith))
    return math.degrees(math.acos(cos_zenith))
