"""Exception hierarchy shared by every paramlp service."""


class ParamLpError(Exception):
    """Base class for all paramlp failures."""


# ── Input / model validation ──


class DimensionMismatchError(ParamLpError):
    pass


class EmptyProblemError(ParamLpError):
    pass


class InconsistentRowsError(ParamLpError):
    """A linearly dependent row of A carries an incompatible right-hand side."""


class NotOrthogonalError(ParamLpError):
    pass


class RankDeficientError(ParamLpError):
    pass


class AnchorMismatchError(ParamLpError):
    """The anchor point d does not satisfy Ad = b."""


class ModeError(ParamLpError):
    """Scalars of the wrong arithmetic mode were supplied."""


class SchemaError(ParamLpError):
    pass


# ── Simplex engine ──


class SingularBasisError(ParamLpError):
    pass


class InvalidBasisError(ParamLpError):
    pass


class IterationLimitError(ParamLpError):
    pass


class SizeGuardError(ParamLpError):
    pass


class InfeasibleError(ParamLpError):
    pass


class VerificationError(ParamLpError):
    """An exact-mode optimum failed its KKT certificate check."""


# ── Parametric machinery ──


class NoParametricDirectionError(ParamLpError):
    def __init__(self, detail: str = "no parametric direction"):
        super().__init__(detail)


class UnsupportedDimensionError(ParamLpError):
    pass


class OutsideProjectionError(ParamLpError):
    pass


class AssumptionViolatedError(ParamLpError):
    pass


class InternalInconsistencyError(ParamLpError):
    pass


class SweepError(ParamLpError):
    pass


class ZeroRowError(ParamLpError):
    pass


# ── Harness ──


class UnverifiedReportError(ParamLpError):
    pass


class BenchAbortError(ParamLpError):
    def __init__(self, detail: str, trace_path: str | None = None):
        super().__init__(detail)
        self.trace_path = trace_path
