"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class MBQCError(Exception):
    """Base class for every error raised by this package."""


# -- gf2 ---------------------------------------------------------------------


class Singular(MBQCError, ArithmeticError):
    """Matrix has no inverse over GF(2)."""


class Infeasible(MBQCError, ArithmeticError):
    """Linear system ``A X = B`` has no solution over GF(2)."""


# -- stabilizer --------------------------------------------------------------


class InvalidStabilizer(MBQCError, ValueError):
    """Generator set does not describe a stabilizer state."""


class NotCommuting(InvalidStabilizer):
    """Two generators anticommute."""


class NotFullRank(InvalidStabilizer):
    """Generators are not independent."""


class NotInStabilizer(MBQCError, ValueError):
    """Pauli word is not an element of the stabilizer group."""


# -- flow --------------------------------------------------------------------


class InvalidPair(MBQCError, ValueError):
    """The pair (igauge, ocomp) is not admissible for the given generators."""


class InvalidGaugeSet(InvalidPair):
    """The sigma_phi columns on igauge are not linearly independent."""


class InvalidOutputSet(InvalidPair):
    """Some outcome outside ocomp cannot be corrected."""


class NonExtremalPair(InvalidPair):
    """|igauge| < |ocomp|: processing relations are not unique."""


class GaugeableOutsideInput(InvalidPair):
    """A qubit outside the input set can be individually gauged."""

    def __init__(self, qubit: int, message: str | None = None) -> None:
        self.qubit = qubit
        super().__init__(message or f"qubit {qubit} lies outside I but can be individually gauged")


class NoValidSplit(InvalidPair):
    """The generators admit no block form with the given input/output sets."""


class RankMismatch(MBQCError, ValueError):
    """rank(H) differs from rank(Z)."""


class NotCommutingReconstruction(MBQCError, ValueError):
    """Processing relations assemble into anticommuting generators."""


class NotOptimalOutput(MBQCError, ValueError):
    """Z cannot be brought into the (Z | I) normal form on a subset of O."""


# -- transforms / ctc --------------------------------------------------------


class SelfLoopAtQubit(MBQCError, ValueError):
    """Operation requires T_aa == 0 but qubit a has a self-loop."""

    def __init__(self, qubit: int) -> None:
        self.qubit = qubit
        super().__init__(f"qubit {qubit} has a self-loop (T[{qubit},{qubit}] = 1)")


class NoSelfLoop(MBQCError, ValueError):
    """break_self_loop called on a qubit without a self-loop."""


class BoundaryQubit(MBQCError, ValueError):
    """A self-looped qubit lies in igauge or ocomp (inconsistent input)."""


class NotMinimal(MBQCError, ValueError):
    """The cycle has a chord or is not a cycle of T at all."""


class BoundaryOverlap(MBQCError, ValueError):
    """The cycle touches igauge or ocomp."""


# -- sim ---------------------------------------------------------------------


class SimulationError(MBQCError):
    """Base class for simulator failures."""


class SizeGuard(SimulationError, ValueError):
    """Pattern exceeds the dense-simulation size limit."""


class ZeroProjection(SimulationError, RuntimeError):
    """All reference vectors were annihilated by the stabilizer projector."""


class NotRunnable(SimulationError, ValueError):
    """Temporal relation contains closed time-like curves."""


class OrderInconsistent(SimulationError, ValueError):
    """Supplied measurement order violates the temporal relation."""


class ZeroSuccessProbability(SimulationError, ValueError):
    """Post-selection event has probability zero."""


# -- cli ---------------------------------------------------------------------


class PatternError(MBQCError, ValueError):
    """Malformed pattern file."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class PatternSyntaxError(PatternError):
    """Unparseable line."""


class MixedSource(PatternError):
    """Both ``edge`` and ``stab`` lines present."""


class IndexOutOfRange(PatternError):
    """Qubit label outside 1..n."""


class WrongStabCount(PatternError):
    """Number of ``stab`` lines differs from ``qubits``."""
