"""Unit conversions.  All internal math is SI (m, s, rad); knots and degrees
appear only at I/O boundaries."""

import math

KT_TO_MS = 1852.0 / 3600.0
MS_TO_KT = 1.0 / KT_TO_MS


def kt(v_kts):
    """Knots to m/s."""
    return v_kts * KT_TO_MS


def to_kt(v_ms):
    """m/s to knots."""
    return v_ms * MS_TO_KT


def wrap_pi(angle_rad):
    """Wrap an angle to [-pi, pi)."""
    return (angle_rad + math.pi) % (2.0 * math.pi) - math.pi
