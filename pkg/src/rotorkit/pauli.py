"""Exact n-rotor Pauli operators.

A Pauli string is stored in Z-X normal order,

    P = exp(2 pi i * phase) * Z(phi) X(m),

with integer momentum shifts ``m`` and angles ``phi`` kept as exact rationals
in units of full turns.  ``X(m) Z(phi) = exp(-i m phi) Z(phi) X(m)`` fixes the
phase picked up when two strings are multiplied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any, Sequence


@dataclass(frozen=True, order=True)
class ExactAngle:
    """An angle ``2 pi * turns`` with ``turns`` an exact rational in [0, 1)."""

    turns: Fraction = Fraction(0)

    def __init__(self, turns: int | Fraction | str = 0):
        if isinstance(turns, ExactAngle):
            turns = turns.turns
        if isinstance(turns, float) or not isinstance(turns, (Rational, str)):
            raise TypeError(f"exact angles need a rational number of turns, got {turns!r}")
        object.__setattr__(self, "turns", Fraction(turns) % 1)

    @classmethod
    def pi_multiple(cls, k: int | Fraction) -> ExactAngle:
        """The angle ``k * pi``."""
        return cls(Fraction(k) / 2)

    def __add__(self, other: ExactAngle) -> ExactAngle:
        if not isinstance(other, ExactAngle):
            return NotImplemented
        return ExactAngle(self.turns + other.turns)

    def __sub__(self, other: ExactAngle) -> ExactAngle:
        if not isinstance(other, ExactAngle):
            return NotImplemented
        return ExactAngle(self.turns - other.turns)

    def __neg__(self) -> ExactAngle:
        return ExactAngle(-self.turns)

    def __mul__(self, k: int) -> ExactAngle:
        if isinstance(k, bool) or not isinstance(k, int):
            return NotImplemented
        return ExactAngle(self.turns * k)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return self.turns != 0

    @property
    def radians(self) -> float:
        return 2 * math.pi * float(self.turns)

    def to_json(self) -> dict[str, int]:
        return {"num": self.turns.numerator, "den": self.turns.denominator}

    @classmethod
    def from_json(cls, obj: Any) -> ExactAngle:
        if isinstance(obj, dict):
            return cls(Fraction(int(obj["num"]), int(obj["den"])))
        if isinstance(obj, str):
            return cls(obj)
        if isinstance(obj, int):
            return cls(obj)
        raise TypeError(f"cannot read an angle from {obj!r}")

    def __repr__(self) -> str:
        return f"ExactAngle({self.turns})"


ZERO = ExactAngle(0)


def angle_dot(ints: Sequence[int], angles: Sequence[ExactAngle]) -> ExactAngle:
    """Exact ``sum_i ints[i] * angles[i]`` reduced mod one turn."""
    return ExactAngle(sum((k * a.turns for k, a in zip(ints, angles)), Fraction(0)))


def _angles(values: Sequence[Any]) -> tuple[ExactAngle, ...]:
    return tuple(v if isinstance(v, ExactAngle) else ExactAngle(v) for v in values)


@dataclass(frozen=True)
class PauliVector:
    n: int
    m: tuple[int, ...]
    phi: tuple[ExactAngle, ...]
    phase: ExactAngle = field(default=ZERO)

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        object.__setattr__(self, "phi", _angles(self.phi))
        if not isinstance(self.phase, ExactAngle):
            object.__setattr__(self, "phase", ExactAngle(self.phase))
        if len(self.m) != self.n or len(self.phi) != self.n:
            raise ValueError(
                f"Pauli on {self.n} rotors needs {self.n} shifts and angles, "
                f"got {len(self.m)} and {len(self.phi)}"
            )

    @classmethod
    def identity(cls, n: int) -> PauliVector:
        return cls(n, (0,) * n, (ZERO,) * n)

    @classmethod
    def x(cls, n: int, rotor: int, shift: int = 1) -> PauliVector:
        m = [0] * n
        m[rotor] = shift
        return cls(n, tuple(m), (ZERO,) * n)

    @classmethod
    def z(cls, n: int, rotor: int, angle: ExactAngle | Fraction | int) -> PauliVector:
        phi = [ZERO] * n
        phi[rotor] = ExactAngle(angle)
        return cls(n, (0,) * n, tuple(phi))

    @classmethod
    def from_parts(
        cls, m: Sequence[int], phi: Sequence[Any], phase: Any = 0
    ) -> PauliVector:
        return cls(len(m), tuple(m), _angles(phi), ExactAngle(phase))

    @property
    def is_x_type(self) -> bool:
        return not any(self.phi)

    @property
    def is_z_type(self) -> bool:
        return not any(self.m)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.m[i] or self.phi[i])

    def without_phase(self) -> PauliVector:
        return PauliVector(self.n, self.m, self.phi)

    def __matmul__(self, other: PauliVector) -> PauliVector:
        return compose(self, other)

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "m": list(self.m),
            "phi": [a.to_json() for a in self.phi],
            "phase": self.phase.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> PauliVector:
        n = int(obj["n"])
        return cls(
            n,
            tuple(int(x) for x in obj["m"]),
            tuple(ExactAngle.from_json(a) for a in obj["phi"]),
            ExactAngle.from_json(obj.get("phase", 0)),
        )


def _check_same_n(u: PauliVector, v: PauliVector) -> None:
    if u.n != v.n:
        raise ValueError(f"Pauli strings act on {u.n} and {v.n} rotors")


def symplectic_phase(u: PauliVector, v: PauliVector) -> ExactAngle:
    """Commutation angle ``m_u . phi_v - phi_u . m_v``.

    ``u v = exp(-i * angle) v u``.
    """
    _check_same_n(u, v)
    return angle_dot(u.m, v.phi) - angle_dot(v.m, u.phi)


def commutes(u: PauliVector, v: PauliVector) -> bool:
    return not symplectic_phase(u, v)


def compose(u: PauliVector, v: PauliVector) -> PauliVector:
    """Operator product ``u v`` brought back to Z-X normal order."""
    _check_same_n(u, v)
    m = tuple(a + b for a, b in zip(u.m, v.m))
    phi = tuple(a + b for a, b in zip(u.phi, v.phi))
    # moving X(m_u) right through Z(phi_v)
    phase = u.phase + v.phase - angle_dot(u.m, v.phi)
    return PauliVector(u.n, m, phi, phase)


def power(u: PauliVector, k: int) -> PauliVector:
    if k < 0:
        return power(inverse(u), -k)
    out = PauliVector.identity(u.n)
    for _ in range(k):
        out = compose(out, u)
    return out


def inverse(u: PauliVector) -> PauliVector:
    # (Z(phi) X(m))^-1 = X(-m) Z(-phi) = exp(-i m.phi) Z(-phi) X(-m)
    return PauliVector(
        u.n,
        tuple(-x for x in u.m),
        tuple(-a for a in u.phi),
        -u.phase - angle_dot(u.m, u.phi),
    )
