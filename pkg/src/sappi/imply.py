"""Step machine for serial IMPLY/FALSE micro-operations.

Memristor cells are modeled at the binary abstraction: 1 is the low-resistance
state, 0 the high-resistance state.  A cell is addressed by a symbolic name
(``"A"``, ``"B"``, ``"M1"``, or per-bit variants like ``"A3"``).  The machine
executes one micro-op per step, which is the defining constraint of the serial
topology, and records every step in a trace so step counts can be asserted.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import ConfigurationError, OperandError

FALSE = "FALSE"
IMPLY = "IMPLY"


@dataclass(frozen=True)
class MicroOp:
    """One FALSE or IMPLY instruction.

    FALSE unconditionally resets its target to 0.  IMPLY stores
    ``NOT source OR target`` into the target cell, overwriting it; the source
    cell is read-only.
    """

    kind: str
    source: str | None
    target: str

    def __post_init__(self):
        if self.kind == FALSE:
            if self.source is not None:
                raise OperandError("FALSE takes a single target operand")
        elif self.kind == IMPLY:
            if self.source is None:
                raise OperandError("IMPLY needs a source operand")
            if self.source == self.target:
                raise OperandError("IMPLY operands must be distinct cells")
        else:
            raise OperandError(f"unknown micro-op kind {self.kind!r}")

    def remap(self, mapping: dict[str, str]) -> "MicroOp":
        src = None if self.source is None else mapping.get(self.source, self.source)
        return MicroOp(self.kind, src, mapping.get(self.target, self.target))


def false_op(target: str) -> MicroOp:
    return MicroOp(FALSE, None, target)


def imply_op(source: str, target: str) -> MicroOp:
    return MicroOp(IMPLY, source, target)


class TraceStep(NamedTuple):
    step: int
    op: MicroOp
    result: int


def format_trace(trace: list[TraceStep]) -> str:
    """Render a trace as one line per executed step.

    Format: ``step=<i> op=<FALSE|IMPLY> src=<cell> dst=<cell> result=<0|1>``
    with ``src=-`` for FALSE ops, which have no source.
    """
    lines = []
    for step, op, result in trace:
        src = op.source if op.source is not None else "-"
        lines.append(f"step={step} op={op.kind} src={src} dst={op.target} result={result}")
    return "\n".join(lines)


@dataclass(frozen=True)
class StepProgram:
    """An ordered micro-op sequence with declared inputs and outputs.

    ``outputs`` maps a semantic role (``"sum"``, ``"cout"``) to the cell that
    holds it after execution.  ``preserved`` lists input cells the program
    guarantees to leave at their initial value.
    """

    ops: tuple[MicroOp, ...]
    inputs: tuple[str, ...]
    outputs: dict[str, str]
    preserved: tuple[str, ...] = ()

    def cells(self) -> set[str]:
        """Every cell the program touches or declares."""
        names = set(self.inputs) | set(self.outputs.values())
        for op in self.ops:
            names.add(op.target)
            if op.source is not None:
                names.add(op.source)
        return names

    def remap(self, mapping: dict[str, str]) -> "StepProgram":
        """Rename cells, e.g. to instantiate a per-bit copy inside an adder chain."""
        return StepProgram(
            ops=tuple(op.remap(mapping) for op in self.ops),
            inputs=tuple(mapping.get(c, c) for c in self.inputs),
            outputs={role: mapping.get(c, c) for role, c in self.outputs.items()},
            preserved=tuple(mapping.get(c, c) for c in self.preserved),
        )

    def __len__(self) -> int:
        return len(self.ops)


@dataclass
class StepMachine:
    """Mutable cell state plus an append-only execution trace.

    State changes only through :meth:`apply_false` and :meth:`apply_imply`;
    one call is one step.  Instances are confined to a single execution
    context; run independent machines for parallel work.
    """

    cells: dict[str, int]
    trace: list[TraceStep] = field(default_factory=list)

    def __post_init__(self):
        for name, level in self.cells.items():
            if level not in (0, 1):
                raise OperandError(f"cell {name!r} must start at 0 or 1, got {level!r}")

    def _require(self, name: str) -> None:
        if name not in self.cells:
            raise OperandError(f"unknown cell {name!r}")

    def apply_false(self, target: str) -> int:
        """Reset ``target`` to 0. All other cells are untouched."""
        self._require(target)
        self.cells[target] = 0
        self.trace.append(TraceStep(len(self.trace), false_op(target), 0))
        return 0

    def apply_imply(self, source: str, target: str) -> int:
        """Store ``NOT source OR target`` in ``target``; ``source`` is unchanged."""
        if source == target:
            raise OperandError("IMPLY operands must be distinct cells")
        self._require(source)
        self._require(target)
        result = (self.cells[source] ^ 1) | self.cells[target]
        self.cells[target] = result
        self.trace.append(TraceStep(len(self.trace), imply_op(source, target), result))
        return result

    def execute(self, op: MicroOp) -> int:
        if op.kind == FALSE:
            return self.apply_false(op.target)
        return self.apply_imply(op.source, op.target)

    def run(self, ops) -> None:
        for op in ops:
            self.execute(op)


@dataclass(frozen=True)
class ProgramResult:
    outputs: dict[str, int]
    cells: dict[str, int]
    trace: tuple[TraceStep, ...]


def run_program(program: StepProgram, inputs: dict[str, int]) -> ProgramResult:
    """Execute a program over fresh cells bound from ``inputs``.

    Work cells (cells the program touches but does not declare as inputs)
    start at 1, the adversarial choice: a program that forgets to FALSE-reset
    a work cell before reading it fails loudly instead of passing by luck.
    Returns the declared outputs plus the final state of every cell so input
    preservation can be checked.
    """
    for name in program.inputs:
        if name not in inputs:
            raise ConfigurationError(f"input cell {name!r} is not bound")
    for name in inputs:
        if name not in program.inputs:
            raise ConfigurationError(f"{name!r} is not a declared input of this program")
    cells = {name: 1 for name in program.cells()}
    cells.update(inputs)
    machine = StepMachine(cells)
    machine.run(program.ops)
    outputs = {role: machine.cells[cell] for role, cell in program.outputs.items()}
    return ProgramResult(outputs=outputs, cells=dict(machine.cells), trace=tuple(machine.trace))
