"""Full-adder algorithms: boolean closed forms, step programs, truth tables.

Three kinds are functionally executable: the exact adder and the two serial
approximate IMPLY adders (sappi1, sappi2).  The remaining kinds are
state-of-the-art serial adders tracked for cost comparison only; their logic
is out of scope and any attempt to execute them raises.
"""

import enum
import io
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .errors import ConsistencyError, UnsupportedKindError
from .imply import StepProgram, false_op, imply_op, run_program


class AdderKind(enum.Enum):
    EXACT = "exact"        # serial exact adder used for the high bits (baseline)
    SAPPI1 = "sappi1"
    SAPPI2 = "sappi2"
    SIAFA13 = "siafa13"    # two published designs sharing one cost row
    SIAFA2 = "siafa2"
    SIAFA4 = "siafa4"
    SAFAN = "safan"
    EXACT2 = "exact2"      # second published exact serial adder, comparison only

    def __str__(self) -> str:
        return self.value


#: Kinds with sum/cout logic available in this package.
EXECUTABLE_KINDS = (AdderKind.EXACT, AdderKind.SAPPI1, AdderKind.SAPPI2)

#: Kinds with a published IMPLY step program.
PROGRAM_KINDS = (AdderKind.SAPPI1, AdderKind.SAPPI2)


def parse_kind(name: str) -> AdderKind:
    try:
        return AdderKind(name.lower())
    except ValueError:
        raise UnsupportedKindError(f"unknown adder kind {name!r}") from None


class FaOutcome(NamedTuple):
    sum: int
    cout: int


def exact_fa(a: int, b: int, c: int) -> FaOutcome:
    """sum = a XOR b XOR c, cout = majority(a, b, c)."""
    return FaOutcome(a ^ b ^ c, (a & b) | (a & c) | (b & c))


def sappi1_fa(a: int, b: int, c: int) -> FaOutcome:
    """sum = NOT(a AND b), cout = (a AND b) OR c.

    The sum is what accumulates in the work memristor after implying both
    inputs onto it; the carry-out overwrites the carry input.  Works
    elementwise on numpy arrays as well as on plain 0/1 ints.
    """
    ab = a & b
    return FaOutcome(ab ^ 1, ab | c)


def sappi2_fa(a: int, b: int, c: int) -> FaOutcome:
    """sum = NOT((a AND b) OR c) OR a, cout = (a AND b) OR c.

    Same carry as sappi1; one extra step implies the carry back onto the
    A memristor, which flips the sum error placement so that the single
    erroneous carry case also flips the sum.
    """
    t = (a & b) | c
    return FaOutcome((t ^ 1) | a, t)


_FA_FUNCTIONS: dict[AdderKind, Callable[[int, int, int], FaOutcome]] = {
    AdderKind.EXACT: exact_fa,
    AdderKind.SAPPI1: sappi1_fa,
    AdderKind.SAPPI2: sappi2_fa,
}


def fa_function(kind: AdderKind) -> Callable[[int, int, int], FaOutcome]:
    try:
        return _FA_FUNCTIONS[kind]
    except KeyError:
        raise UnsupportedKindError(f"{kind} has no executable logic") from None


def build_program(kind: AdderKind) -> StepProgram:
    """Return the published micro-op sequence for a one-bit addition.

    sappi1 (4 steps): reset M1, imply A then B onto M1 (sum lands in M1),
    imply M1 onto C (carry-out lands in C).  A and B are preserved.

    sappi2 (5 steps): the same four steps, then imply C onto A so the sum
    lands in A; only B is preserved, and M1 is free for reuse.
    """
    if kind == AdderKind.SAPPI1:
        return StepProgram(
            ops=(
                false_op("M1"),
                imply_op("A", "M1"),
                imply_op("B", "M1"),
                imply_op("M1", "C"),
            ),
            inputs=("A", "B", "C"),
            outputs={"sum": "M1", "cout": "C"},
            preserved=("A", "B"),
        )
    if kind == AdderKind.SAPPI2:
        return StepProgram(
            ops=(
                false_op("M1"),
                imply_op("A", "M1"),
                imply_op("B", "M1"),
                imply_op("M1", "C"),
                imply_op("C", "A"),
            ),
            inputs=("A", "B", "C"),
            outputs={"sum": "A", "cout": "C"},
            preserved=("B",),
        )
    raise UnsupportedKindError(f"no published step program for {kind}")


@dataclass(frozen=True)
class FullAdderSpec:
    """Binds an adder kind to its logic, step program, and per-bit cost figures."""

    kind: AdderKind
    program: StepProgram | None
    sum_fn: Callable | None
    cout_fn: Callable | None
    energy_per_bit_nj: float | None
    steps_per_bit: int
    memristor_rule: Callable[[int, int], int]


def _memristors_shared(n: int, k: int) -> int:
    return 2 * n + 3


def _memristors_sappi1(n: int, k: int) -> int:
    # sum results stay in the work memristors, so one extra cell per approximated bit
    return 2 * n + k + 3


def _spec(kind, energy, steps, rule=_memristors_shared) -> FullAdderSpec:
    program = build_program(kind) if kind in PROGRAM_KINDS else None
    fn = _FA_FUNCTIONS.get(kind)
    return FullAdderSpec(
        kind=kind,
        program=program,
        sum_fn=(lambda a, b, c: fn(a, b, c).sum) if fn else None,
        cout_fn=(lambda a, b, c: fn(a, b, c).cout) if fn else None,
        energy_per_bit_nj=energy,
        steps_per_bit=steps,
        memristor_rule=rule,
    )


_REGISTRY: dict[AdderKind, FullAdderSpec] = {
    AdderKind.EXACT: _spec(AdderKind.EXACT, 4.8250, 22),
    AdderKind.EXACT2: _spec(AdderKind.EXACT2, 4.0772, 23),
    AdderKind.SIAFA13: _spec(AdderKind.SIAFA13, 1.7090, 8),
    AdderKind.SIAFA2: _spec(AdderKind.SIAFA2, 2.5131, 10),
    AdderKind.SIAFA4: _spec(AdderKind.SIAFA4, 1.7066, 8),
    AdderKind.SAFAN: _spec(AdderKind.SAFAN, 1.6628, 7),
    AdderKind.SAPPI1: _spec(AdderKind.SAPPI1, 0.7980, 4, _memristors_sappi1),
    AdderKind.SAPPI2: _spec(AdderKind.SAPPI2, 1.0919, 5),
}


def adder_spec(kind: AdderKind) -> FullAdderSpec:
    return _REGISTRY[kind]


class TruthRow(NamedTuple):
    a: int
    b: int
    c: int
    outcome: FaOutcome


def truth_table(kind: AdderKind) -> list[TruthRow]:
    """All 8 input combinations for an executable kind.

    For kinds with a step program the program is executed for every row and
    checked against the closed form; a mismatch raises ConsistencyError and
    indicates a bug in this package, never expected in normal operation.
    """
    fn = fa_function(kind)
    program = build_program(kind) if kind in PROGRAM_KINDS else None
    rows = []
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                outcome = fn(a, b, c)
                if program is not None:
                    result = run_program(program, {"A": a, "B": b, "C": c})
                    executed = FaOutcome(result.outputs["sum"], result.outputs["cout"])
                    if executed != outcome:
                        raise ConsistencyError(
                            f"{kind} program gave {executed} for ({a},{b},{c}), "
                            f"closed form gives {outcome}"
                        )
                rows.append(TruthRow(a, b, c, outcome))
    return rows


def truth_table_csv(kind: AdderKind) -> str:
    """CSV with per-row comparison against the exact adder."""
    out = io.StringIO()
    out.write("A,B,C,sum,cout,sum_exact,cout_exact,sum_ok,cout_ok\n")
    for a, b, c, outcome in truth_table(kind):
        exact = exact_fa(a, b, c)
        out.write(
            f"{a},{b},{c},{outcome.sum},{outcome.cout},{exact.sum},{exact.cout},"
            f"{int(outcome.sum == exact.sum)},{int(outcome.cout == exact.cout)}\n"
        )
    return out.getvalue()
