"""Polynomials with known integer roots, for stress-testing the solver.

A member of the family is ``sign * prod_{i=-m..m} (x - i)**e[i]`` searched on
``[-m - delta_lo, m + delta_hi]`` with ``delta_lo, delta_hi in {0, 1}``, so roots
land both inside the interval and on its ends. The expanded coefficients are
integers. They are built from a table of ``q(x) = prod_{i=1..m} (x - i)**e[i]``
factors via ``p(x) = +-q1(-x) * x**e0 * q2(x)`` and stay exact as long as they
fit in 53 bits; members whose coefficients do not are skipped and counted.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterator

from .expr import Const, Expr, Pow, X
from .interval import Interval
from .solver import SolverConfig, solve

__all__ = [
    "ExactPoly",
    "FamilyReport",
    "FamilySpec",
    "QTable",
    "SpecResult",
    "build",
    "count_specs",
    "enumerate_specs",
    "exponent_vectors",
    "family_size",
    "horner_expr",
    "factored_expr",
    "run_family",
    "run_spec",
]

EXACT_LIMIT = 2**53


@dataclass(frozen=True)
class FamilySpec:
    m: int
    e: tuple  # exponents for i = -m, ..., m
    sign: int = 1
    delta_lo: int = 0
    delta_hi: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        if len(self.e) != 2 * self.m + 1:
            raise ValueError(f"need {2 * self.m + 1} exponents, got {len(self.e)}")
        if any(k < 0 for k in self.e) or sum(self.e) == 0:
            raise ValueError("exponents must be nonnegative with a positive sum")
        if self.sign not in (1, -1) or self.delta_lo not in (0, 1) or self.delta_hi not in (0, 1):
            raise ValueError("sign must be +-1 and deltas 0 or 1")

    @property
    def degree(self) -> int:
        return sum(self.e)

    def exponent(self, i: int) -> int:
        return self.e[i + self.m]

    @property
    def roots(self) -> dict:
        """Root -> multiplicity."""
        return {i - self.m: k for i, k in enumerate(self.e) if k}

    @property
    def domain(self) -> Interval:
        return Interval(-self.m - self.delta_lo, self.m + self.delta_hi)

    @property
    def spec_id(self) -> str:
        exps = ".".join(map(str, self.e))
        s = "+" if self.sign > 0 else "-"
        return f"m{self.m}:{s}:{self.delta_lo}{self.delta_hi}:{exps}"

    @classmethod
    def from_id(cls, text: str) -> "FamilySpec":
        m, s, deltas, exps = text.split(":")
        return cls(
            int(m[1:]),
            tuple(int(k) for k in exps.split(".")),
            1 if s == "+" else -1,
            int(deltas[0]),
            int(deltas[1]),
        )


@dataclass(frozen=True)
class ExactPoly:
    coeffs: tuple  # c_0 .. c_d as Python ints
    overflow: bool

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc


# --------------------------------------------------------------------------
# counting and enumeration


def family_size(m: int, d: int) -> int:
    """Closed form for the number of members of degree ``d``."""
    return 8 * math.comb(2 * m + d, d)


def count_specs(m: int, d: int) -> int:
    """Members of degree ``d`` counted by dynamic programming over the slots."""
    ways = [1] + [0] * d  # ways[s]: vectors over the slots seen so far with sum s
    for _ in range(2 * m + 1):
        acc = 0
        for s in range(d + 1):
            acc += ways[s]
            ways[s] = acc
    return 8 * ways[d]


def exponent_vectors(n: int, total: int) -> Iterator[tuple]:
    """All ``n``-tuples of nonnegative ints summing to ``total``, lexicographically descending."""
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in exponent_vectors(n - 1, total - first):
            yield (first,) + rest


def enumerate_specs(m: int, d_max: int, d_min: int = 1) -> Iterator[FamilySpec]:
    if m < 1 or d_max < 1:
        raise ValueError("m and d_max must be positive")
    for d in range(d_min, d_max + 1):
        for e in exponent_vectors(2 * m + 1, d):
            for sign in (1, -1):
                for dl in (0, 1):
                    for dh in (0, 1):
                        yield FamilySpec(m, e, sign, dl, dh)


# --------------------------------------------------------------------------
# exact expansion


def _times_linear(coeffs: list, root: int) -> list:
    """``coeffs * (x - root)``, ascending order."""
    out = [0] * (len(coeffs) + 1)
    for k, c in enumerate(coeffs):
        out[k + 1] += c
        out[k] -= root * c
    return out


def _convolve(a, b) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


class QTable:
    """Coefficients of ``prod_{i=1..m} (x - i)**e[i]`` for every ``e`` with ``1 <= sum(e) <= d_max``.

    Built once, degree by degree, each entry from a degree-lower one times a
    single linear factor. Read-only afterwards.
    """

    def __init__(self, m: int, d_max: int):
        self.m = m
        self.d_max = d_max
        table = {}
        frontier = {(0,) * m: [1]}
        for _ in range(d_max):
            nxt = {}
            for e, coeffs in frontier.items():
                # extend only at or after the last nonzero slot: each multiset once
                last = max((i for i, k in enumerate(e) if k), default=0)
                for i in range(last, m):
                    e2 = e[:i] + (e[i] + 1,) + e[i + 1 :]
                    nxt[e2] = _times_linear(coeffs, i + 1)
            table.update(nxt)
            frontier = nxt
        self._table = table

    def __len__(self):
        return len(self._table)

    def __contains__(self, e):
        return tuple(e) in self._table

    def get(self, e) -> list:
        e = tuple(e)
        if not any(e):
            return [1]
        return self._table[e]

    @staticmethod
    def expected_size(m: int, d_max: int) -> int:
        return sum(math.comb(m + j - 1, j) for j in range(1, d_max + 1))


@lru_cache(maxsize=8)
def _shared_table(m: int, d_max: int) -> QTable:
    return QTable(m, d_max)


def expand(spec: FamilySpec, table: QTable | None = None) -> ExactPoly:
    m = spec.m
    e = spec.e
    if table is None or table.m != m or table.d_max < spec.degree:
        table = _shared_table(m, max(spec.degree, 1))
    neg = e[:m][::-1]  # exponents of (x + 1), ..., (x + m)
    pos = e[m + 1 :]
    q1 = table.get(neg)
    # q1(-x), then the sign that turns prod (-x - i) into prod (x + i)
    s1 = -1 if sum(neg) % 2 else 1
    q1m = [c * s1 * (-1 if k % 2 else 1) for k, c in enumerate(q1)]
    body = _convolve(q1m, table.get(pos))
    coeffs = [0] * e[m] + [spec.sign * c for c in body]
    overflow = any(abs(c) > EXACT_LIMIT for c in coeffs)
    return ExactPoly(tuple(coeffs), overflow)


def horner_expr(coeffs) -> Expr:
    """``c0 + x*(c1 + x*(... + x*cd))`` with exact integer constants."""
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    node: Expr = Const(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        node = X * node
        if c:
            node = Const(c) + node
    return node


def factored_expr(spec: FamilySpec) -> Expr:
    node = None
    for i in range(-spec.m, spec.m + 1):
        k = spec.exponent(i)
        if not k:
            continue
        base = X if i == 0 else (X - Const(i))
        factor = base if k == 1 else Pow(base, k)
        node = factor if node is None else node * factor
    if spec.sign < 0:
        node = -node
    return node


def build(spec: FamilySpec, table: QTable | None = None):
    """``(factored expression, exact expansion)`` for one member."""
    return factored_expr(spec), expand(spec, table)


# --------------------------------------------------------------------------
# sweeps


@dataclass
class SpecResult:
    spec_id: str
    d: int
    missed_roots: int
    candidate_count: int
    spurious: int
    elapsed_us: int
    max_multiplicity: int
    skipped: bool = False
    complete: bool = True
    statuses: dict = field(default_factory=dict)


def run_spec(spec: FamilySpec, cfg: SolverConfig, form: str = "horner", table=None) -> SpecResult:
    roots = spec.roots
    mult = max(roots.values())
    factored, poly = build(spec, table)
    if form == "horner":
        if poly.overflow:
            return SpecResult(spec.spec_id, spec.degree, 0, 0, 0, 0, mult, skipped=True)
        f = horner_expr(poly.coeffs)
    elif form == "factored":
        f = factored
    else:
        raise ValueError(f"unknown form {form!r}")
    t0 = time.perf_counter()
    res = solve(f, spec.domain, cfg)
    elapsed = int((time.perf_counter() - t0) * 1e6)
    cands = res.candidates
    missed = sum(1 for r in roots if not any(c.lo <= r <= c.hi for c in cands))
    spurious = 0
    for c in cands:
        gap = min(max(c.lo - r, r - c.hi, 0.0) for r in roots)
        if gap > cfg.tau_c:
            spurious += 1
    statuses = {}
    for c in cands:
        statuses[c.status.value] = statuses.get(c.status.value, 0) + 1
    return SpecResult(
        spec.spec_id, spec.degree, missed, len(cands), spurious, elapsed, mult,
        complete=res.complete, statuses=statuses,
    )


def _run_chunk(args):
    ids, cfg, form = args
    return [run_spec(FamilySpec.from_id(i), cfg, form) for i in ids]


@dataclass
class FamilyReport:
    m: int
    d_max: int
    rows: list
    elapsed_s: float
    config: dict

    @property
    def specs(self) -> int:
        return len(self.rows)

    @property
    def skipped(self) -> int:
        return sum(r.skipped for r in self.rows)

    @property
    def missed_roots(self) -> int:
        return sum(r.missed_roots for r in self.rows)

    @property
    def spurious(self) -> int:
        return sum(r.spurious for r in self.rows)

    @property
    def incomplete(self) -> int:
        return sum(not r.complete for r in self.rows)

    def per_degree(self) -> dict:
        out = {}
        for r in self.rows:
            out[r.d] = out.get(r.d, 0) + 1
        return out

    def worst_by_multiplicity(self) -> dict:
        """Largest candidate count seen for each highest root multiplicity."""
        out = {}
        for r in self.rows:
            if not r.skipped:
                out[r.max_multiplicity] = max(out.get(r.max_multiplicity, 0), r.candidate_count)
        return out

    def summary(self) -> dict:
        return {
            "m": self.m,
            "d_max": self.d_max,
            "specs": self.specs,
            "skipped_overflow": self.skipped,
            "missed_roots": self.missed_roots,
            "spurious_candidates": self.spurious,
            "incomplete": self.incomplete,
            "candidates": sum(r.candidate_count for r in self.rows),
            "worst_candidates_by_multiplicity": self.worst_by_multiplicity(),
            "elapsed_s": round(self.elapsed_s, 3),
            "config": self.config,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["spec_id", "d", "missed_roots", "candidate_count", "elapsed_us"])
        for r in self.rows:
            w.writerow([r.spec_id, r.d, r.missed_roots, r.candidate_count, r.elapsed_us])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {"summary": self.summary(), "rows": [asdict(r) for r in self.rows]}, indent=2
        )


def run_family(
    m: int,
    d_max: int,
    cfg: SolverConfig | None = None,
    *,
    form: str = "horner",
    jobs: int = 1,
    d_min: int = 1,
    progress=None,
) -> FamilyReport:
    """Solve every member with ``d_min <= degree <= d_max`` and score the results."""
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    specs = list(enumerate_specs(m, d_max, d_min))
    table = _shared_table(m, d_max)
    if jobs <= 1:
        rows = []
        for k, s in enumerate(specs):
            rows.append(run_spec(s, cfg, form, table))
            if progress:
                progress(k + 1, len(specs))
    else:
        from concurrent.futures import ProcessPoolExecutor

        ids = [s.spec_id for s in specs]
        size = max(1, len(ids) // (jobs * 8))
        chunks = [(ids[i : i + size], cfg, form) for i in range(0, len(ids), size)]
        rows = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_run_chunk, chunks):
                rows.extend(part)
                if progress:
                    progress(len(rows), len(specs))
    config = {
        "tau_x": cfg.tau_x,
        "tau_w": cfg.tau_w,
        "tau_c": cfg.tau_c,
        "max_iterations": cfg.max_iterations,
        "form": form,
    }
    return FamilyReport(m, d_max, rows, time.perf_counter() - t0, config)
