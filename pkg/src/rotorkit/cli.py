"""``rotorkit`` command-line front end.

Every subcommand writes JSON (CSV for the Wigner grid) to ``--out`` or stdout.
Exit codes: 0 success, 1 invalid input, 2 mathematical failure, 3 I/O error;
failures print a JSON object with ``error`` and ``message`` to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import _intmat as im
from .clifford import group_law_suite, synthesize_generators
from .codes import (
    CSSViolation,
    HomologicalRotorCode,
    encoded_logicals,
    encoder_matrix,
    encoder_reproduces_code,
    encoding_circuit,
    logical_operators,
)
from .gkp_repetition import RepetitionConfig, monte_carlo, verify_circuit
from .lattice import homology, smith_normal_form
from .number_phase import OrientationSearchError, np_logicals, to_number_phase
from .simulator import rotor_gkp_comb, wigner
from .theta import overlap_grid


class InputError(ValueError):
    pass


class MathError(RuntimeError):
    pass


# ---- output -------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float printed to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, complex):
        return dumps([obj.real, obj.imag], indent, _level)
    if isinstance(obj, Fraction):
        return dumps({"num": obj.numerator, "den": obj.denominator}, indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        if len(obj) <= 4 and all(not isinstance(v, (dict, list, tuple)) for v in obj.values()):
            return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()) + "}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ---- input --------------------------------------------------------------


def _load_json(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def _entry(x: Any) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise InputError(f"matrix entries must be integers or decimal strings, got {x!r}")
    try:
        return int(x)
    except ValueError:
        raise InputError(f"not a decimal integer: {x!r}") from None


def _matrix(obj: Any) -> im.IntMatrix:
    if isinstance(obj, dict):
        for key in ("matrix", "M", "A"):
            if key in obj:
                obj = obj[key]
                break
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise InputError("expected a JSON array of arrays")
    rows = tuple(tuple(_entry(x) for x in r) for r in obj)
    if len({len(r) for r in rows}) > 1:
        raise InputError("ragged matrix")
    return rows


def _code(path: str) -> HomologicalRotorCode:
    obj = _load_json(path)
    if not isinstance(obj, dict) or "n" not in obj:
        raise InputError('code JSON needs keys "n", "hx", "hz"')
    n = obj["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError("n must be a positive integer")
    hx = _matrix(obj.get("hx") or [])
    hz = _matrix(obj.get("hz") or [])
    for name, M in (("hx", hx), ("hz", hz)):
        if M and len(M[0]) != n:
            raise InputError(f"{name} must have {n} columns")
    return HomologicalRotorCode(n, hx, hz)


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise InputError(f"--{name} must be positive")


# ---- subcommands --------------------------------------------------------


def _homology_json(code: HomologicalRotorCode) -> dict:
    h = homology(code)
    return {"torsion": list(h.torsion), "free_rank": h.free_rank, "formula_mismatch": h.formula_mismatch}


def cmd_analyze(args) -> dict:
    code = _code(args.code)
    code.validate()
    out: dict[str, Any] = {"code": code.to_json(), "homology": _homology_json(code)}
    out["logicals"] = logical_operators(code).to_json()
    word = encoding_circuit(code)
    A, ds = encoder_matrix(code)
    out["encoder"] = {
        "A": im.to_str_rows(A),
        "canonical_x_stabilizers": [str(d) for d in ds],
        "word": word.to_json(),
        "word_text": str(word),
        "reproduces_code": encoder_reproduces_code(code, word),
    }
    return out


def cmd_snf(args) -> dict:
    M = _matrix(_load_json(args.input))
    ncols = len(M[0]) if M else 0
    snf = smith_normal_form(M, ncols or None)
    if not snf.verify(M):
        raise MathError("Smith decomposition failed verification")
    out = snf.to_json()
    out["rank"] = snf.rank
    out["verified"] = True
    return out


def cmd_homology(args) -> dict:
    code = _code(args.code)
    h = homology(code)
    out = h.to_json()
    out["torsion"] = list(h.torsion)
    return out


def cmd_synthesize(args) -> dict:
    A = _matrix(_load_json(args.matrix))
    if not A or any(len(r) != len(A) for r in A):
        raise InputError("synthesis needs a square matrix")
    if abs(im.det(A)) != 1:
        raise InputError("matrix is not unimodular")
    word = synthesize_generators(A)
    g = word.evaluate(len(A))
    if g.A != A or not g.is_css:
        raise MathError("synthesized word does not reproduce the matrix")
    return {"word": word.to_json(), "word_text": str(word), "length": len(word)}


def cmd_to_np(args) -> dict:
    code = _code(args.code)
    npc = to_number_phase(code)
    out = npc.to_json()
    out["logicals"] = np_logicals(npc).to_json()
    return out


def cmd_encode(args) -> dict:
    code = _code(args.code)
    A, ds = encoder_matrix(code)
    word = encoding_circuit(code)
    logs = encoded_logicals(code, word)
    return {
        "A": im.to_str_rows(A),
        "invariant_factors": [str(d) for d in ds],
        "word": word.to_json(),
        "word_text": str(word),
        "reproduces_code": encoder_reproduces_code(code, word),
        "logicals": [{"x": x.to_json(), "z": z.to_json(), "order": d} for x, z, d in logs],
    }


def cmd_wigner(args) -> str:
    _positive("N", args.N)
    _positive("delta", args.delta)
    if args.grid < 64:
        raise InputError("--grid must be at least 64")
    state = rotor_gkp_comb(args.N, args.L, args.delta, args.label)
    ls = np.arange(-args.lmax, args.lmax + 1)
    W = wigner(state, ls, M=args.grid)
    phis = -math.pi + 2 * math.pi * np.arange(args.grid) / args.grid
    lines = ["phi,l,w"]
    for i, l in enumerate(ls):
        for j, p in enumerate(phis):
            lines.append(f"{_fmt_float(p)},{int(l)},{_fmt_float(W[i, j])}")
    return "\n".join(lines)


def cmd_qec_grid(args) -> list:
    _positive("N", args.N)
    _positive("delta", args.delta)
    rows = overlap_grid(args.N, args.delta, args.mmax, tuple(args.dtheta))
    return [
        {
            "m": r.m,
            "mp": r.mp,
            "dtheta": r.dtheta,
            "bra": r.bra,
            "ket": r.ket,
            "closed_form": r.closed_form,
            "brute_force": r.brute_force,
            "rel_error": r.rel_error,
            "agrees": r.agrees(),
            "printed_form_matches": r.printed_matches,
        }
        for r in rows
    ]


def cmd_gkp_rep(args) -> dict:
    try:
        config = RepetitionConfig(
            args.m, args.sigma_z, args.sigma_x, args.shots, args.seed, args.exclude_failures, args.fock
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out = monte_carlo(config).to_json()
    if args.verify:
        out["circuit"] = verify_circuit(config, args.L, args.delta, (args.xi1, args.xi2)).to_json()
    return out


def cmd_verify_group(args) -> dict:
    if args.n < 1 or args.words < 1:
        raise InputError("--n and --words must be positive")
    report = group_law_suite(args.words, args.n, args.seed)
    if not report.ok:
        raise MathError(f"group-law failures: {report.failures}")
    return report.to_json()


# ---- parser -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rotorkit", description="Homological rotor codes toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.set_defaults(func=func)
        return sp

    sp = add(
        "analyze",
        cmd_analyze,
        "Homology H_1 = ker(H_Z)/im(H_X^T) (torsion and free rank), logical operators and the "
        "encoder word A_enc = V^-T from the Smith form U H_X V = D.",
    )
    sp.add_argument("--code", required=True)
    sp = add("snf", cmd_snf, "Smith normal form U M V = D with unimodular witnesses and d_i | d_{i+1}.")
    sp.add_argument("--input", required=True)
    sp = add("homology", cmd_homology, "Torsion invariant factors and free rank of ker(H_Z)/im(H_X^T).")
    sp.add_argument("--code", required=True)
    sp = add(
        "synthesize",
        cmd_synthesize,
        "Word in CNOT, CNOT^dag, SWAP and P whose X block equals the unimodular matrix (Euclidean elimination).",
    )
    sp.add_argument("--matrix", required=True)
    sp = add(
        "to-np",
        cmd_to_np,
        "Number-phase code: sign flips S and row basis B with B H_X S >= 0, H_Z S, semigroup generators, logicals.",
    )
    sp.add_argument("--code", required=True)
    sp = add("encode", cmd_encode, "Encoder matrix, circuit and encoded logical pairs (X(1), Z(2 pi/d)) per torsion rotor.")
    sp.add_argument("--code", required=True)
    sp = add(
        "wigner",
        cmd_wigner,
        "Wigner function W(l, phi) = (1/2pi) int psi(phi - s/2) conj psi(phi + s/2) e^{isl} ds of the "
        "regularized comb sum_k (+-1)^k exp(-delta (kN)^2/2) |kN>; CSV columns phi,l,w.",
    )
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--grid", type=int, default=512, help="quadrature points and phi grid size")
    sp.add_argument("--L", type=int, default=60, help="momentum cutoff")
    sp.add_argument("--lmax", type=int, default=4, help="l range [-lmax, lmax]")
    sp.add_argument("--label", type=int, default=0, choices=(0, 1))
    sp = add(
        "qec-grid",
        cmd_qec_grid,
        "Overlaps <a| E_m'^dag E_m |b> of comb qubits with envelope exp(-delta l^2): theta-function closed "
        "form against the direct sum over k in [-60, 60].",
    )
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--mmax", type=int, default=4)
    sp.add_argument("--dtheta", type=float, nargs="+", default=[0.0, 0.3, 1.1])
    sp = add(
        "gkp-rep",
        cmd_gkp_rep,
        "Repetition code with a GKP ancilla: syndrome wrap(xi1 + xi2, 2 pi/m), residual (xi1 + xi2)/2 on success. "
        "Parallelism is capped by ROTORKIT_THREADS.",
    )
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--sigma-z", type=float, required=True)
    sp.add_argument("--sigma-x", type=float, default=0.0)
    sp.add_argument("--shots", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--exclude-failures", action="store_true")
    sp.add_argument("--fock", action="store_true", help="number-phase variant")
    sp.add_argument("--verify", action="store_true", help="also run the truncated-state circuit check")
    sp.add_argument("--L", type=int, default=40)
    sp.add_argument("--delta", type=float, default=0.01)
    sp.add_argument("--xi1", type=float, default=0.15)
    sp.add_argument("--xi2", type=float, default=-0.05)
    sp = add(
        "verify-group",
        cmd_verify_group,
        "Exact group-law checks on random words: Q^T Lambda Q = Lambda, block form, g = h n round trip, "
        "closure of the angle subgroup under conjugation, commutation phases preserved.",
    )
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--words", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    return p


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "exit_code": code, "message": message}) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else _fail(1, "usage", "invalid command-line arguments")
    try:
        result = args.func(args)
        _emit(result if isinstance(result, str) else dumps(result), args.out)
    except (CSSViolation, OrientationSearchError, MathError, ArithmeticError, AssertionError) as exc:
        return _fail(2, type(exc).__name__, str(exc))
    except OSError as exc:
        return _fail(3, type(exc).__name__, str(exc))
    except (InputError, ValueError, TypeError, IndexError, KeyError) as exc:
        return _fail(1, type(exc).__name__, str(exc))
    except RuntimeError as exc:
        return _fail(2, type(exc).__name__, str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
