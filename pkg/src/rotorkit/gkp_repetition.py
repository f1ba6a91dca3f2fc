"""GKP-repetition code on planar rotors: Monte Carlo syndrome statistics and a
truncated-state check of the syndrome-extraction circuit.

Data rotor 1 holds the logical rotor, rotor 2 a rotor GKP comb of spacing
``m``; ``CNOT(2->1)`` encodes.  Dephasing ``Z(xi1) x Z(xi2)`` is read out on a
third rotor prepared in the comb ``sum_n |nm>`` after ``CNOT(3->1) CNOT(3->2)``:
its phase distribution peaks at ``2 pi f / m + xi1 + xi2``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .clifford import Atom, GeneratorWord
from .simulator import (
    TruncatedRotorState,
    apply_pauli_numeric,
    apply_word,
    phase_distribution,
)

CHUNK = 16384


@dataclass(frozen=True)
class RepetitionConfig:
    m: int
    sigma_z: float
    sigma_x: float = 0.0
    shots: int = 100_000
    seed: int = 0
    exclude_failures: bool = False
    fock: bool = False

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if self.sigma_z < 0 or self.sigma_x < 0:
            raise ValueError("noise strengths must be non-negative")
        if self.shots < 1:
            raise ValueError("shots must be at least 1")


@dataclass(frozen=True)
class TrialOutcome:
    syndrome_z: float
    syndrome_x: int
    residual_z: float
    z_failure: bool
    x_failure: bool


def wrap(x, period: float):
    """``x`` minus the nearest multiple of ``period``, in ``[-period/2, period/2)``."""
    if period <= 0:
        raise ValueError("period must be positive")
    return x - period * np.floor(np.asarray(x) / period + 0.5) if isinstance(x, np.ndarray) else (
        x - period * math.floor(x / period + 0.5)
    )


def wrap_int(k, m: int):
    """Integer wrap into ``[-m/2, m/2)``."""
    if isinstance(k, np.ndarray):
        return k - m * np.floor_divide(2 * k + m, 2 * m)
    return k - m * ((2 * k + m) // (2 * m))


def decode(xi1, xi2, kick, m: int):
    """Syndromes, residual and failure flags for given noise samples (scalars or arrays)."""
    total = xi1 + xi2
    syn_z = wrap(total, 2 * math.pi / m)
    z_fail = syn_z != total
    if isinstance(total, np.ndarray):
        residual = np.where(z_fail, total, total / 2)
    else:
        residual = total if z_fail else total / 2
    syn_x = wrap_int(kick, m)
    x_fail = syn_x != kick
    return syn_z, syn_x, residual, z_fail, x_fail


def _sample(config: RepetitionConfig, rng: np.random.Generator, size: int):
    xi = rng.normal(0.0, config.sigma_z, size=(2, size)) if config.sigma_z > 0 else np.zeros((2, size))
    kick = (
        np.rint(rng.normal(0.0, config.sigma_x, size=size)).astype(np.int64)
        if config.sigma_x > 0
        else np.zeros(size, dtype=np.int64)
    )
    return xi[0], xi[1], kick


def run_trial(config: RepetitionConfig, rng: np.random.Generator) -> TrialOutcome:
    xi1, xi2, kick = _sample(config, rng, 1)
    syn_z, syn_x, res, zf, xf = decode(xi1, xi2, kick, config.m)
    return TrialOutcome(float(syn_z[0]), int(syn_x[0]), float(res[0]), bool(zf[0]), bool(xf[0]))


@dataclass
class _Moments:
    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add_array(self, x: np.ndarray) -> None:
        if len(x) == 0:
            return
        nb = len(x)
        mb = float(np.mean(x))
        m2b = float(np.sum((x - mb) ** 2))
        n = self.n + nb
        delta = mb - self.mean
        self.mean += delta * nb / n
        self.m2 += m2b + delta * delta * self.n * nb / n
        self.n = n

    @property
    def var(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0


@dataclass(frozen=True)
class MonteCarloStats:
    shots: int
    var_residual_z: float
    var_ratio: float
    z_fail_rate: float
    x_fail_rate: float
    stderr_var_residual_z: float
    stderr_var_ratio: float
    stderr_z_fail_rate: float
    stderr_x_fail_rate: float
    var_residual_z_success_only: float
    mean_residual_z: float

    def to_json(self) -> dict:
        return asdict(self)


def _threads() -> int:
    env = os.environ.get("ROTORKIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError("ROTORKIT_THREADS must be a positive integer") from None
    return os.cpu_count() or 1


def _chunk(config: RepetitionConfig, seed_seq: np.random.SeedSequence, size: int):
    rng = np.random.default_rng(seed_seq)
    xi1, xi2, kick = _sample(config, rng, size)
    _, _, res, zf, xf = decode(xi1, xi2, kick, config.m)
    return res, zf, xf


def monte_carlo(config: RepetitionConfig, threads: int | None = None) -> MonteCarloStats:
    """Vectorized Monte Carlo over independent seed streams.

    Shots are split into fixed-size chunks, each with its own child of
    ``SeedSequence(seed)``; results are combined in chunk order so the output
    does not depend on the thread count.
    """
    sizes = [CHUNK] * (config.shots // CHUNK)
    if config.shots % CHUNK:
        sizes.append(config.shots % CHUNK)
    children = np.random.SeedSequence(config.seed).spawn(len(sizes))
    workers = min(threads or _threads(), len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda a: _chunk(config, *a), zip(children, sizes)))
    else:
        results = [_chunk(config, c, s) for c, s in zip(children, sizes)]
    all_m, ok_m = _Moments(), _Moments()
    zf_count = xf_count = 0
    for res, zf, xf in results:
        ok_m.add_array(res[~zf])
        all_m.add_array(res if not config.exclude_failures else res[~zf])
        zf_count += int(zf.sum())
        xf_count += int(xf.sum())
    n = config.shots
    var = all_m.var
    s2 = config.sigma_z**2
    se_var = var * math.sqrt(2.0 / max(all_m.n - 1, 1))
    pz, px = zf_count / n, xf_count / n
    return MonteCarloStats(
        shots=n,
        var_residual_z=var,
        var_ratio=var / s2 if s2 > 0 else float("nan"),
        z_fail_rate=pz,
        x_fail_rate=px,
        stderr_var_residual_z=se_var,
        stderr_var_ratio=se_var / s2 if s2 > 0 else float("nan"),
        stderr_z_fail_rate=math.sqrt(pz * (1 - pz) / n),
        stderr_x_fail_rate=math.sqrt(px * (1 - px) / n),
        var_residual_z_success_only=ok_m.var,
        mean_residual_z=all_m.mean,
    )


@dataclass(frozen=True)
class CircuitReport:
    m: int
    L: int
    delta: float
    mode: str
    xi: tuple[float, float]
    expected_peaks: tuple[float, ...]
    found_peaks: tuple[float, ...]
    grid_step: float
    max_peak_error: float
    input_truncation_weight: float
    evolved_truncation_weight: float
    stabilizer_xx: float
    stabilizer_xx_expected: float
    stabilizer_z: complex

    @property
    def peaks_ok(self) -> bool:
        return self.max_peak_error <= self.grid_step

    def to_json(self) -> dict:
        out = asdict(self)
        out["stabilizer_z"] = [self.stabilizer_z.real, self.stabilizer_z.imag]
        out["peaks_ok"] = self.peaks_ok
        return out


def _comb(m: int, L: int, delta: float, fock: bool) -> tuple[dict[tuple[int], float], float]:
    """Regularized comb on multiples of ``m`` inside the cutoff, plus its relative tail weight."""
    lo = 0 if fock else -(L // m)
    amps = {(k * m,): math.exp(-delta * (k * m) ** 2 / 2) for k in range(lo, L // m + 1)}
    kept = sum(a * a for a in amps.values())
    tail = 0.0
    k = L // m + 1
    while True:
        t = math.exp(-delta * (k * m) ** 2)
        tail += t if fock else 2 * t
        if t < 1e-30 * kept:
            break
        k += 1
    return amps, tail / (kept + tail)


def verify_circuit(
    config: RepetitionConfig,
    L: int,
    delta: float,
    xi: tuple[float, float] = (0.0, 0.0),
    *,
    grid: int = 4096,
    logical: dict[int, complex] | None = None,
    max_truncation: float = 1e-6,
) -> CircuitReport:
    """Simulate the syndrome-extraction circuit on truncated states.

    Inputs are cut at ``|l| <= L`` and evolved in a box of ``2L + 2`` so the
    gates never clip.  The run aborts when the input truncation exceeds
    ``max_truncation``.
    """
    m = config.m
    if m > 4 or L > 40:
        raise ValueError("the circuit check is meant for m <= 4 and L <= 40")
    fock = config.fock
    mode = "fock" if fock else "planar"
    box = 2 * L + 2
    logical = logical or {0: 1.0, 1: 1.0}
    psi = TruncatedRotorState(1, box, {(k,): a for k, a in logical.items()}, mode).normalized()
    comb, trunc = _comb(m, L, delta, fock)
    if trunc > max_truncation:
        raise RuntimeError(f"input truncation {trunc:.3g} exceeds {max_truncation:g}")
    gkp = TruncatedRotorState(1, box, comb, mode).normalized()
    code = apply_word(psi.tensor(gkp), [Atom("cnot", 1, 0)])

    # stabilizers of the clean codeword
    xx = apply_pauli_numeric(code, [m, m], [0.0, 0.0])
    stab_xx = code.inner(xx).real
    zz = apply_pauli_numeric(code, [0, 0], [0.0, 2 * math.pi / m])
    stab_z = code.inner(zz)
    norm2 = sum(a * a for a in comb.values())
    xx_expected = sum(a * comb.get((k[0] + m,), 0.0) for k, a in comb.items()) / norm2

    noisy = apply_pauli_numeric(code, [0, 0], [xi[0], xi[1]])
    anc = TruncatedRotorState(1, box, comb, mode).normalized()
    state = apply_word(noisy.tensor(anc), GeneratorWord([Atom("cnot", 2, 0), Atom("cnot", 2, 1)]))

    thetas = -math.pi + 2 * math.pi * np.arange(grid) / grid
    dist = phase_distribution(state, thetas, rotor=2)
    step = 2 * math.pi / grid
    s = xi[0] + xi[1]
    expected, found = [], []
    for f in range(m):
        centre = float(wrap(2 * math.pi * f / m + s, 2 * math.pi))
        offs = wrap(thetas - centre, 2 * math.pi)
        window = np.abs(offs) < math.pi / m
        idx = np.flatnonzero(window)[np.argmax(dist[window])]
        expected.append(centre)
        found.append(float(thetas[idx]))
    err = max(abs(float(wrap(a - b, 2 * math.pi))) for a, b in zip(found, expected))
    return CircuitReport(
        m=m,
        L=L,
        delta=delta,
        mode=mode,
        xi=(float(xi[0]), float(xi[1])),
        expected_peaks=tuple(expected),
        found_peaks=tuple(found),
        grid_step=step,
        max_peak_error=err,
        input_truncation_weight=trunc,
        evolved_truncation_weight=state.truncation_weight,
        stabilizer_xx=stab_xx,
        stabilizer_xx_expected=xx_expected,
        stabilizer_z=stab_z,
    )
