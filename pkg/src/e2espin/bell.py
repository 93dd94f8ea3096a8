"""CHSH operator and Bell-inequality quantities for the electron pair.

The fixed-setting CHSH combination is

    Pi = A1 (B1 - B2) + A2 (B1 + B2),

with A_i = a_i . sigma on the first electron and B_i = b_i . sigma on
the second.  The default projection directions maximize the violation
for the singlet: a1 = z, a2 = x, b1 = -(x + z)/sqrt(2),
b2 = (z - x)/sqrt(2).  Local realism bounds <Pi> by 2; quantum
mechanics by 2 sqrt(2) (Tsirelson).  The cross-section form of the
inequality is normalized so that its classical bound is 1/sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spin import PAULI, AmplitudePair, DegenerateStateError, SpinDensityMatrix

__all__ = [
    "DetectorSettings",
    "DEFAULT_SETTINGS",
    "TSIRELSON_BOUND",
    "CHSH_CLASSICAL_BOUND",
    "RATIO_BOUND",
    "chsh_operator",
    "chsh_expectation",
    "chsh_closed_form",
    "bell_lhs_cross_sections",
    "spin_asymmetry",
    "violates_bell",
]

TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
CHSH_CLASSICAL_BOUND = 2.0
RATIO_BOUND = 1.0 / math.sqrt(2.0)

_S = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class DetectorSettings:
    """Unit projection directions of the two spin analyzers."""

    a1: tuple = (0.0, 0.0, 1.0)
    a2: tuple = (1.0, 0.0, 0.0)
    b1: tuple = (-_S, 0.0, -_S)
    b2: tuple = (-_S, 0.0, _S)

    def vectors(self):
        out = []
        for name in ("a1", "a2", "b1", "b2"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,):
                raise ValueError(f"setting {name} must be a 3-vector")
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError(f"setting {name} must be a unit vector")
            out.append(v)
        return out


DEFAULT_SETTINGS = DetectorSettings()


def _dot_sigma(n) -> np.ndarray:
    return n[0] * PAULI[0] + n[1] * PAULI[1] + n[2] * PAULI[2]


def chsh_operator(settings: DetectorSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """4x4 Hermitian CHSH operator in the product basis."""
    a1, a2, b1, b2 = settings.vectors()
    op_a1 = _dot_sigma(a1)
    op_a2 = _dot_sigma(a2)
    op_b1 = _dot_sigma(b1)
    op_b2 = _dot_sigma(b2)
    return np.kron(op_a1, op_b1 - op_b2) + np.kron(op_a2, op_b1 + op_b2)


def chsh_expectation(rho, settings: DetectorSettings = DEFAULT_SETTINGS) -> float:
    """Tr(rho Pi) for a product-basis density matrix."""
    if isinstance(rho, SpinDensityMatrix):
        if rho.basis != "product":
            raise ValueError("chsh_expectation requires a product-basis matrix")
        m = rho.matrix
    else:
        m = np.asarray(rho, dtype=complex)
    return float(np.trace(m @ chsh_operator(settings)).real)


def chsh_closed_form(amps: AmplitudePair, pol1, pol2) -> float:
    """<Pi> at the default settings, directly from amplitudes.

    sqrt(2) [2 Re(t_d t_e*)(1 - z1y z2y)
             - (|t_d|^2 + |t_e|^2)(z1x z2x + z1z z2z)] / u,
    u = |t_d|^2 + |t_e|^2 - Re(t_d t_e*)(1 + z1.z2).

    Valid for unit polarization vectors, and with the ensemble vectors
    P1, P2 substituted for them in the partially polarized case.
    """
    td, te = complex(amps.t_d), complex(amps.t_e)
    z1 = np.asarray(pol1, dtype=float)
    z2 = np.asarray(pol2, dtype=float)
    re = (td * te.conjugate()).real
    ab2 = abs(td) ** 2 + abs(te) ** 2
    u = ab2 - re * (1.0 + float(z1 @ z2))
    if u <= 1e-14 * (ab2 + 1e-300):
        raise DegenerateStateError("pair state vanishes (u = 0)")
    num = 2.0 * re * (1.0 - z1[1] * z2[1]) - ab2 * (z1[0] * z2[0] + z1[2] * z2[2])
    return math.sqrt(2.0) * num / u


def bell_lhs_cross_sections(i_anti: float, i_par: float, p1, p2) -> float:
    """Left-hand side of the cross-section form of Bell's inequality.

    [I_anti (1 - P1.P2) - I_par (1 - P1y P2y)]
      / [I_anti (1 - P1.P2) + I_par (1 + P1.P2)],
    violated when the value exceeds 1/sqrt(2).  I_anti is the
    antiparallel-spin TDCS and I_par the parallel-spin TDCS.
    """
    if i_anti < 0.0 or i_par < 0.0:
        raise ValueError("cross sections must be nonnegative")
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    dot = float(p1 @ p2)
    den = i_anti * (1.0 - dot) + i_par * (1.0 + dot)
    if den == 0.0:
        raise ValueError("zero denominator: no measurable flux for these inputs")
    num = i_anti * (1.0 - dot) - i_par * (1.0 - p1[1] * p2[1])
    return num / den


def spin_asymmetry(i_anti: float, i_par: float) -> float:
    """Spin asymmetry (I_anti - I_par)/(I_anti + I_par).

    Values above 1/sqrt(2) indicate a Bell-inequality violation when at
    least one of the initial electrons is unpolarized.
    """
    if i_anti < 0.0 or i_par < 0.0:
        raise ValueError("cross sections must be nonnegative")
    den = i_anti + i_par
    if den == 0.0:
        raise ValueError("zero denominator: both cross sections vanish")
    return (i_anti - i_par) / den


def violates_bell(ratio_lhs: float) -> bool:
    """Strict violation predicate for the 1/sqrt(2)-bounded forms."""
    return ratio_lhs > RATIO_BOUND
