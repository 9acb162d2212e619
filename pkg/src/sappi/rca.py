"""Ripple-carry adders with approximated low bits, plus a shift-and-add multiplier.

Two execution modes produce identical values: a fast functional mode that
evaluates the per-bit boolean forms (scalar or vectorized over numpy arrays),
and a step-accurate mode that drives the published micro-op programs through a
StepMachine for the approximated bits.  The high ``n - k`` bits always use the
exact adder; its 22-step sequence is not reconstructed here, so step-accurate
mode computes those bits functionally while the cost fields account the
published 22 steps per exact bit.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import costs
from .adders import AdderKind, EXECUTABLE_KINDS, PROGRAM_KINDS, build_program, fa_function
from .errors import RangeError, UnsupportedKindError
from .imply import StepMachine, TraceStep


@dataclass(frozen=True)
class RcaConfig:
    """Width-n ripple adder whose k low-order bits use the approximate kind."""

    n: int
    k: int
    kind: AdderKind = AdderKind.EXACT

    def __post_init__(self):
        if self.n < 1:
            raise RangeError(f"width must be positive, got n={self.n}")
        if not 0 <= self.k <= self.n:
            raise RangeError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")

    def describe(self) -> str:
        return f"{self.kind} {self.k}/{self.n}"


@dataclass(frozen=True)
class AddResult:
    value: int        # n+1 bits: sum including carry-out
    steps: int
    energy_nj: float


def _require_executable(cfg: RcaConfig) -> None:
    if cfg.k > 0 and cfg.kind not in EXECUTABLE_KINDS:
        raise UnsupportedKindError(f"{cfg.kind} is cost-model only and cannot be executed")


def _check_operands(cfg: RcaConfig, a, b, cin) -> None:
    limit = 1 << cfg.n
    a_arr, b_arr = np.asarray(a), np.asarray(b)
    if (a_arr < 0).any() or (a_arr >= limit).any() or (b_arr < 0).any() or (b_arr >= limit).any():
        raise RangeError(f"operands must lie in [0, 2^{cfg.n})")
    if cin not in (0, 1):
        raise RangeError("carry-in must be 0 or 1")


def ripple_bits(cfg: RcaConfig, a, b, cin: int = 0):
    """Core bitwise ripple evaluation; works on ints and numpy arrays alike.

    Returns the full n+1-bit sum (carry-out in bit n).  No validation: callers
    own range checks so array call sites pay them once.
    """
    fa_approx = fa_function(cfg.kind) if cfg.k > 0 else None
    carry = a * 0 + cin
    out = a * 0
    for i in range(cfg.n):
        ai = (a >> i) & 1
        bi = (b >> i) & 1
        if i < cfg.k:
            si, carry = fa_approx(ai, bi, carry)
        else:
            si = ai ^ bi ^ carry
            carry = (ai & bi) | (carry & (ai | bi))
        out = out | (si << i)
    return out | (carry << cfg.n)


def rca_add(cfg: RcaConfig, a: int, b: int, cin: int = 0) -> AddResult:
    """One n-bit addition in functional mode, with its modeled cost."""
    _require_executable(cfg)
    _check_operands(cfg, a, b, cin)
    return AddResult(
        value=int(ripple_bits(cfg, int(a), int(b), cin)),
        steps=costs.steps(cfg.kind, cfg.n, cfg.k),
        energy_nj=costs.energy(cfg.kind, cfg.n, cfg.k),
    )


def rca_add_array(cfg: RcaConfig, a: np.ndarray, b: np.ndarray, cin: int = 0) -> np.ndarray:
    """Vectorized functional mode over integer arrays; returns the n+1-bit sums."""
    _require_executable(cfg)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    _check_operands(cfg, a, b, cin)
    return ripple_bits(cfg, a, b, cin)


@lru_cache(maxsize=None)
def _bit_programs(kind: AdderKind, k: int):
    """Per-bit instances of the one-bit program, sharing the carry cell C.

    sappi1 keeps each bit's sum in its own work cell, so every bit gets a
    fresh M cell; sappi2 frees its work cell each bit and reuses a single M1.
    """
    program = build_program(kind)
    instances = []
    for i in range(k):
        mapping = {
            "A": f"A{i}",
            "B": f"B{i}",
            "C": "C",
            "M1": "M1" if kind == AdderKind.SAPPI2 else f"M{i}",
        }
        bit_program = program.remap(mapping)
        instances.append((bit_program, bit_program.outputs["sum"]))
    return tuple(instances)


def rca_add_stepwise(cfg: RcaConfig, a: int, b: int, cin: int = 0) -> tuple[AddResult, list[TraceStep]]:
    """Step-accurate mode: execute the micro-op program for every approximated bit.

    The approximated bits share one carry cell C, exactly as in the serial
    array: each bit's program overwrites C with its carry-out, which the next
    bit consumes.  Returns the same AddResult as functional mode plus the
    executed trace, whose length is 4k (sappi1) or 5k (sappi2).
    """
    _require_executable(cfg)
    if cfg.k > 0 and cfg.kind not in PROGRAM_KINDS:
        raise UnsupportedKindError(f"{cfg.kind} has no step program for the approximated bits")
    _check_operands(cfg, a, b, cin)

    sum_bits = 0
    trace: list[TraceStep] = []
    carry = cin
    if cfg.k > 0:
        cells: dict[str, int] = {"C": cin}
        for i in range(cfg.k):
            cells[f"A{i}"] = (a >> i) & 1
            cells[f"B{i}"] = (b >> i) & 1
            # work cells start set so a missing FALSE reset cannot go unnoticed
            cells["M1" if cfg.kind == AdderKind.SAPPI2 else f"M{i}"] = 1
        machine = StepMachine(cells)
        for i, (bit_program, sum_cell) in enumerate(_bit_programs(cfg.kind, cfg.k)):
            machine.run(bit_program.ops)
            sum_bits |= machine.cells[sum_cell] << i
        carry = machine.cells["C"]
        trace = machine.trace

    # high bits: exact adder, modeled functionally (its step sequence is not
    # published here); the cost fields below account 22 steps per exact bit
    fa = fa_function(AdderKind.EXACT)
    for i in range(cfg.k, cfg.n):
        si, carry = fa((a >> i) & 1, (b >> i) & 1, carry)
        sum_bits |= si << i
    sum_bits |= carry << cfg.n

    result = AddResult(
        value=sum_bits,
        steps=costs.steps(cfg.kind, cfg.n, cfg.k),
        energy_nj=costs.energy(cfg.kind, cfg.n, cfg.k),
    )
    return result, trace


@dataclass(frozen=True)
class MulConfig:
    """Shift-and-add multiplier built around one ripple adder.

    The accumulator is the adder, so the product must fit its width:
    ``a_bits + b_bits <= rca.n``.
    """

    rca: RcaConfig
    a_bits: int = 8
    b_bits: int = 8

    def __post_init__(self):
        if self.a_bits < 1 or self.b_bits < 1:
            raise RangeError("operand widths must be positive")
        if self.a_bits + self.b_bits > self.rca.n:
            raise RangeError(
                f"product needs {self.a_bits + self.b_bits} bits "
                f"but the adder is {self.rca.n} bits wide"
            )


@dataclass
class MulCost:
    """Accumulated cost of the additions a multiplier actually executed."""

    additions: int = 0
    steps: int = 0
    energy_nj: float = 0.0

    def add(self, other: "MulCost") -> None:
        self.additions += other.additions
        self.steps += other.steps
        self.energy_nj += other.energy_nj


def _count_cost(cfg: RcaConfig, additions: int) -> MulCost:
    return MulCost(
        additions=additions,
        steps=additions * costs.steps(cfg.kind, cfg.n, cfg.k),
        energy_nj=additions * costs.energy(cfg.kind, cfg.n, cfg.k),
    )


def shift_add_multiply(cfg: MulConfig, a: int, b: int) -> tuple[int, MulCost]:
    """Multiply via one addition per set multiplier bit (zero bits are skipped).

    Every executed addition runs through the configured ripple adder, so with
    approximated bits the product deviates from a*b; with k=0 it is exact.
    Note that additions execute for set bits of ``b`` even when ``a`` is zero,
    and an approximate addition of zero summands is itself approximate.
    """
    if not 0 <= a < (1 << cfg.a_bits):
        raise RangeError(f"multiplicand must lie in [0, 2^{cfg.a_bits})")
    if not 0 <= b < (1 << cfg.b_bits):
        raise RangeError(f"multiplier must lie in [0, 2^{cfg.b_bits})")
    _require_executable(cfg.rca)
    acc = 0
    additions = 0
    for j in range(cfg.b_bits):
        if (b >> j) & 1:
            acc = int(ripple_bits(cfg.rca, acc, a << j, 0))
            additions += 1
            if acc >> cfg.rca.n:
                raise RangeError("product overflowed the adder width")
    return acc, _count_cost(cfg.rca, additions)


def shift_add_multiply_array(cfg: MulConfig, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, MulCost]:
    """Vectorized multiplier with elementwise skip-on-zero semantics.

    ``a`` and ``b`` broadcast against each other; for each element the
    additions executed are exactly the set bits of its ``b`` value, matching
    the scalar routine bit for bit.
    """
    _require_executable(cfg.rca)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if (a < 0).any() or (a >= (1 << cfg.a_bits)).any():
        raise RangeError(f"multiplicand must lie in [0, 2^{cfg.a_bits})")
    if (b < 0).any() or (b >= (1 << cfg.b_bits)).any():
        raise RangeError(f"multiplier must lie in [0, 2^{cfg.b_bits})")
    a, b = np.broadcast_arrays(a, b)
    acc = np.zeros(a.shape, dtype=np.int64)
    additions = 0
    for j in range(cfg.b_bits):
        mask = ((b >> j) & 1).astype(bool)
        if not mask.any():
            continue
        added = ripple_bits(cfg.rca, acc, a << j, 0)
        acc = np.where(mask, added, acc)
        additions += int(mask.sum())
        if (acc >> cfg.rca.n).any():
            raise RangeError("product overflowed the adder width")
    return acc, _count_cost(cfg.rca, additions)
