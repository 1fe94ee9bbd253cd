from pydantic import BaseModel, Field, model_validator
from typing import Literal, Optional, Union

# JSON scalars: numbers, "p/q" strings, or "+inf"/"-inf" for interval endpoints
ScalarJson = Union[int, float, str]


# ── Problem Documents ──


class LpDocument(BaseModel):
    name: str = "lp"
    A: list[list[ScalarJson]] = Field(description="m×n constraint matrix, row major")
    b: list[ScalarJson] = Field(description="Right-hand side, length m")
    c: list[ScalarJson] = Field(description="Cost vector, length n (minimized)")
    # Optional parametric block
    d: Optional[list[ScalarJson]] = Field(
        default=None,
        description="Anchor point with Ad = b, ideally d ≥ 0",
    )
    B: Optional[list[list[ScalarJson]]] = Field(
        default=None,
        description="l×n matrix whose rows are orthogonal to the rows of A",
    )
    meta: dict = Field(default_factory=dict, description="Generator certificates and provenance")

    @property
    def has_parametric_block(self) -> bool:
        return self.d is not None and self.B is not None


class ParametricBlockDocument(BaseModel):
    """The (d, B) block of a pair, stored apart from its LP."""

    d: list[ScalarJson]
    B: list[list[ScalarJson]]


# ── Trace Documents ──


class TraceStep(BaseModel):
    enter: int
    leave: int
    objective: ScalarJson


class TraceDocument(BaseModel):
    rule: str
    phase1_steps: int = 0
    steps: list[TraceStep] = Field(default_factory=list)


class SolutionDocument(BaseModel):
    instance: str
    rule: str
    status: Literal["optimal", "infeasible", "unbounded"]
    objective: Optional[ScalarJson] = None
    x: list[ScalarJson] = Field(default_factory=list)
    w: list[ScalarJson] = Field(default_factory=list, description="Row multipliers with Aᵀw + y = c")
    y: list[ScalarJson] = Field(default_factory=list, description="Reduced costs (dual slacks)")
    basis: list[int] = Field(default_factory=list)
    ray: Optional[list[ScalarJson]] = Field(default=None, description="Improving ray when unbounded")
    pivots: int = 0
    phase1_steps: int = 0
    verified: bool = False


# ── Parametric Documents ──


class IntervalDocument(BaseModel):
    lo: ScalarJson
    hi: ScalarJson
    lo_closed: bool = True
    hi_closed: bool = True
    image: Optional[ScalarJson] = Field(
        default=None,
        description="Constant opposite-side value on an invariancy interval",
    )


class WitnessDocument(BaseModel):
    point: ScalarJson
    image: IntervalDocument
    basis: list[int] = Field(default_factory=list)


class DecompositionDocument(BaseModel):
    side: Literal["primal", "dual"]
    theta: Optional[IntervalDocument] = None
    transition_points: list[ScalarJson] = Field(default_factory=list)
    intervals: list[IntervalDocument] = Field(default_factory=list)
    witnesses: list[WitnessDocument] = Field(default_factory=list)
    hops: int = 0
    hop_bound_exceeded: bool = False


# ── Path Reports ──


class PathReportDocument(BaseModel):
    instance: str
    n: int
    status: str = "optimal"
    pivots_phase2: int
    pivots_bootstrap: int
    pivots_total: int = 0
    walk_trivial: bool = False
    bound_holds: bool
    breakpoints: list[ScalarJson] = Field(default_factory=list)
    optimal_value: Optional[ScalarJson] = None
    optimal_verified: bool
    s: list[ScalarJson] = Field(default_factory=list)
    seed: Optional[int] = None
    t_max: Optional[ScalarJson] = None
    assumption_clean: bool = True
    fallback: bool = False
    bootstrap_exceeded: bool = False
    breakpoints_certified: bool = True
    path_kkt_ok: bool = True


class BoundSummaryDocument(BaseModel):
    holds: int = 0
    fails: int = 0
    trivial_walks: int = 0
    max_ratio: Optional[ScalarJson] = None
    counterexamples: list[PathReportDocument] = Field(default_factory=list)


# ── Bench Suites ──


class InstanceSpec(BaseModel):
    kind: Literal["klee_minty", "random_bounded", "fixture"]
    name: Optional[str] = None
    D: Optional[int] = Field(default=None, description="Klee–Minty dimension")
    m: Optional[int] = None
    n: Optional[int] = None
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _check_params(self):
        if self.kind == "klee_minty" and self.D is None:
            raise ValueError("klee_minty instances need D")
        if self.kind == "random_bounded" and None in (self.m, self.n, self.seed):
            raise ValueError("random_bounded instances need m, n and seed")
        if self.kind == "fixture" and not self.name:
            raise ValueError("fixture instances need a name")
        return self

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "klee_minty":
            return f"klee_minty_D{self.D}"
        return f"random_m{self.m}_n{self.n}_s{self.seed}"


class SuiteSpec(BaseModel):
    instances: list[InstanceSpec] = Field(default_factory=list)
    rules: list[Literal["bland", "dantzig", "parametric"]] = Field(default_factory=lambda: ["bland"])
    arith: Literal["exact", "float"] = "exact"


class BenchRecord(BaseModel):
    instance: str
    rule: str
    n: int
    m: int
    status: str
    pivots: int
    pivots_bootstrap: int = 0
    phase1_steps: int = 0
    bound_holds: bool
    runtime: float
    optimal_value: Optional[ScalarJson] = None
    optimal_verified: bool
    brute_force_agrees: Optional[bool] = None


class BenchReport(BaseModel):
    records: list[BenchRecord] = Field(default_factory=list)
    total_pivots: int = 0
    pivots_by_rule: dict[str, int] = Field(default_factory=dict)
    bound_summary: Optional[BoundSummaryDocument] = None
