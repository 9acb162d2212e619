"""Analytic energy, step, and memristor-count model for all adder kinds.

Costs are linear in the approximation degree k: an n-bit ripple adder with k
approximated low bits costs ``per_bit_approx * k + per_bit_exact * (n - k)``
in both nanojoules and steps.  The exact baseline is the first exact serial
adder (4.8250 nJ and 22 steps per bit); improvement percentages are always
relative to it.
"""

import io
import json
from dataclasses import dataclass

from .adders import AdderKind, adder_spec
from .errors import RangeError

EXACT_ENERGY_PER_BIT_NJ = 4.8250
EXACT_STEPS_PER_BIT = 22

#: step duration in the reference device setup; documented only, never used in math
STEP_PULSE_SECONDS = 30e-6

_EXACT_KINDS = (AdderKind.EXACT, AdderKind.EXACT2)

#: row order of the published comparison table
TABLE_ORDER = (
    AdderKind.EXACT,
    AdderKind.EXACT2,
    AdderKind.SIAFA13,
    AdderKind.SIAFA2,
    AdderKind.SIAFA4,
    AdderKind.SAFAN,
    AdderKind.SAPPI1,
    AdderKind.SAPPI2,
)


@dataclass(frozen=True)
class CostEntry:
    kind: AdderKind
    energy_approx_bit_nj: float
    energy_exact_bit_nj: float
    steps_approx_bit: int
    steps_exact_bit: int

    def memristors(self, n: int, k: int) -> int:
        return adder_spec(self.kind).memristor_rule(n, k)


def cost_entry(kind: AdderKind) -> CostEntry:
    spec = adder_spec(kind)
    return CostEntry(
        kind=kind,
        energy_approx_bit_nj=spec.energy_per_bit_nj,
        energy_exact_bit_nj=EXACT_ENERGY_PER_BIT_NJ,
        steps_approx_bit=spec.steps_per_bit,
        steps_exact_bit=EXACT_STEPS_PER_BIT,
    )


def _check_range(n: int, k: int) -> None:
    if n < 1:
        raise RangeError(f"width must be positive, got n={n}")
    if not 0 <= k <= n:
        raise RangeError(f"approximation degree must satisfy 0 <= k <= n, got k={k}, n={n}")


def energy(kind: AdderKind, n: int, k: int) -> float:
    """Total energy in nJ of one n-bit addition with k approximated bits."""
    _check_range(n, k)
    spec = adder_spec(kind)
    if kind in _EXACT_KINDS:
        return spec.energy_per_bit_nj * n
    return spec.energy_per_bit_nj * k + EXACT_ENERGY_PER_BIT_NJ * (n - k)


def steps(kind: AdderKind, n: int, k: int) -> int:
    """Total step count of one n-bit addition with k approximated bits."""
    _check_range(n, k)
    spec = adder_spec(kind)
    if kind in _EXACT_KINDS:
        return spec.steps_per_bit * n
    return spec.steps_per_bit * k + EXACT_STEPS_PER_BIT * (n - k)


def memristors(kind: AdderKind, n: int, k: int) -> int:
    """Memristor count of the n-bit adder array."""
    _check_range(n, k)
    return adder_spec(kind).memristor_rule(n, k)


@dataclass(frozen=True)
class ComparisonRow:
    kind: AdderKind
    energy_nj: float
    steps: int
    memristors: int
    energy_improvement: float  # fraction vs the exact baseline, negative = worse
    steps_improvement: float


def comparison_table(n: int, k: int) -> list[ComparisonRow]:
    """One row per adder kind, in the published table order."""
    _check_range(n, k)
    base_energy = energy(AdderKind.EXACT, n, k)
    base_steps = steps(AdderKind.EXACT, n, k)
    rows = []
    for kind in TABLE_ORDER:
        e = energy(kind, n, k)
        s = steps(kind, n, k)
        rows.append(
            ComparisonRow(
                kind=kind,
                energy_nj=e,
                steps=s,
                memristors=memristors(kind, n, k),
                energy_improvement=1.0 - e / base_energy,
                steps_improvement=1.0 - s / base_steps,
            )
        )
    return rows


def comparison_csv(rows: list[ComparisonRow]) -> str:
    out = io.StringIO()
    out.write("kind,energy_nj,steps,memristors,energy_improvement_pct,steps_improvement_pct\n")
    for r in rows:
        out.write(
            f"{r.kind},{r.energy_nj:.4f},{r.steps},{r.memristors},"
            f"{100.0 * r.energy_improvement:.4f},{100.0 * r.steps_improvement:.4f}\n"
        )
    return out.getvalue()


def comparison_json(rows: list[ComparisonRow], n: int, k: int) -> str:
    payload = {
        "n": n,
        "k": k,
        "rows": [
            {
                "kind": str(r.kind),
                "energy_nj": r.energy_nj,
                "steps": r.steps,
                "memristors": r.memristors,
                "energy_improvement_pct": 100.0 * r.energy_improvement,
                "steps_improvement_pct": 100.0 * r.steps_improvement,
            }
            for r in rows
        ],
    }
    return json.dumps(payload, indent=2)


@dataclass(frozen=True)
class GainReport:
    """Savings of an application that performs ``additions`` approximate additions."""

    application: str
    kind: AdderKind
    n: int
    k: int
    additions: int
    energy_saved_nj: float
    steps_saved: int
    energy_improvement: float
    steps_improvement: float

    @property
    def energy_saved_j(self) -> float:
        return self.energy_saved_nj * 1e-9

    def to_dict(self) -> dict:
        return {
            "application": self.application,
            "kind": str(self.kind),
            "n": self.n,
            "k": self.k,
            "additions": self.additions,
            "energy_saved_nj": self.energy_saved_nj,
            "energy_saved_j": self.energy_saved_j,
            "steps_saved": self.steps_saved,
            "energy_improvement_pct": 100.0 * self.energy_improvement,
            "steps_improvement_pct": 100.0 * self.steps_improvement,
        }


def application_gains(application: str, additions: int, kind: AdderKind, n: int, k: int) -> GainReport:
    """Scale the per-addition savings against the exact baseline by ``additions``."""
    if additions < 0:
        raise RangeError("addition count cannot be negative")
    _check_range(n, k)
    exact_e = energy(AdderKind.EXACT, n, k)
    exact_s = steps(AdderKind.EXACT, n, k)
    e = energy(kind, n, k)
    s = steps(kind, n, k)
    return GainReport(
        application=application,
        kind=kind,
        n=n,
        k=k,
        additions=additions,
        energy_saved_nj=(exact_e - e) * additions,
        steps_saved=(exact_s - s) * additions,
        energy_improvement=1.0 - e / exact_e,
        steps_improvement=1.0 - s / exact_s,
    )


def gains_csv(report: GainReport) -> str:
    d = report.to_dict()
    header = ",".join(d.keys())
    values = ",".join(str(v) for v in d.values())
    return f"{header}\n{values}\n"
