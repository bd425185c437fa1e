from enum import Enum
from typing import Any, Literal

from pydantic import BaseModel, Field, computed_field, model_validator


class EvalCounters(BaseModel):
    f_values: int = 0
    f_derivative_sets: int = 0
    c_values: int = 0
    c_derivative_sets: int = 0

    def snapshot(self) -> 'EvalCounters':
        return self.model_copy()

    def minus(self, other: 'EvalCounters') -> dict[str, int]:
        return {name: getattr(self, name) - getattr(other, name) for name in EvalCounters.model_fields}


class SubsolverControls(BaseModel):
    theta: float = Field(default=100.0, gt=0)
    max_inner_iters: int = Field(default=100_000, gt=0)
    armijo_c: float = Field(default=1e-4, gt=0, lt=1)
    backtrack_factor: float = Field(default=0.5, gt=0, lt=1)
    initial_step: float | None = Field(default=None, gt=0)


class ArpccConfig(BaseModel):
    p: int = Field(default=2, ge=1, le=3)
    sigma0: float = Field(default=1.0, gt=0)
    sigma_min: float = Field(default=1e-8, gt=0)
    gamma1: float = Field(default=0.5, gt=0, lt=1)
    gamma2: float = Field(default=2.0, gt=1)
    gamma3: float = Field(default=4.0, gt=1)
    eta1: float = Field(default=0.01, gt=0, lt=1)
    eta2: float = Field(default=0.9, gt=0, lt=1)
    epsilon: float = Field(default=1e-6, gt=0, le=1)
    max_outer_iters: int = Field(default=50_000, gt=0)
    subsolver: SubsolverControls = Field(default_factory=SubsolverControls)

    @model_validator(mode='after')
    def check_orderings(self):
        if self.sigma0 < self.sigma_min:
            raise ValueError('sigma0 must be at least sigma_min')
        if self.gamma3 < self.gamma2:
            raise ValueError('gamma3 must be at least gamma2')
        if self.eta2 < self.eta1:
            raise ValueError('eta2 must be at least eta1')
        return self


class ArpgcConfig(BaseModel):
    eps_p: float = Field(default=1e-3, gt=0)
    eps_d: float = Field(default=1e-3, gt=0, lt=1)
    delta: float = Field(default=2.0, gt=1)
    beta: float = Field(default=1.0, gt=0)
    inner: ArpccConfig = Field(default_factory=ArpccConfig)
    max_outer_targets: int | None = Field(default=None, gt=0)

    @model_validator(mode='after')
    def check_primal_tolerance(self):
        bound = min(self.beta, ((self.delta - 1) / self.delta) ** self.inner.p, 1.0)
        if self.eps_p > bound:
            raise ValueError(f'eps_p must not exceed min[beta, ((delta-1)/delta)^p, 1] = {bound:.6g}')
        return self

    @property
    def primal_threshold(self) -> float:
        """eps_P - eps_P^((p+1)/p): the residual level that counts as small."""
        p = self.inner.p
        return self.eps_p - self.eps_p ** ((p + 1) / p)


class ArpccStatus(str, Enum):
    CRITICALITY_REACHED = 'CriticalityReached'
    CUSTOM_PREDICATE = 'CustomPredicate'
    BUDGET_EXCEEDED = 'BudgetExceeded'
    NO_DESCENT = 'NoDescent'


class IterationOutcome(str, Enum):
    VERY_SUCCESSFUL = 'very_successful'
    SUCCESSFUL = 'successful'
    UNSUCCESSFUL = 'unsuccessful'


class TargetKind(str, Enum):
    INITIAL = 'initial'
    K_PLUS = 'K_plus'
    K_MINUS = 'K_minus'
    TERMINAL = 'terminal'


class CertificateStatus(str, Enum):
    INFEASIBLE_CRITICAL = 'InfeasibleCritical'
    SCALED_KKT = 'ScaledKKT'


class Certificate(BaseModel):
    status: CertificateStatus
    phase: Literal[1, 2]
    x_eps: list[float]
    t_eps: float | None = None
    y_eps: list[float] | None = None
    c_norm: float
    chi_infeasibility: float
    chi_merit: float | None = None
    chi_lagrangian: float | None = None
    multiplier_scale: float | None = None
    dual_scale: float = 1.0


RecordKind = Literal['run-config', 'arpcc-iter', 'arpcc-end', 'arpgc-target', 'certificate']


class TraceRecord(BaseModel):
    run_id: str
    segment: int
    iteration: int
    kind: RecordKind
    payload: dict[str, Any]
    counters: EvalCounters


class CheckOutcome(BaseModel):
    passed: bool = True
    checked: int = 0
    failures: list[str] = Field(default_factory=list)


class ReplayReport(BaseModel):
    checks: dict[str, CheckOutcome] = Field(default_factory=dict)
    warnings: list[str] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(outcome.passed for outcome in self.checks.values())

    @property
    def failed_checks(self) -> list[str]:
        return [name for name, outcome in self.checks.items() if not outcome.passed]


class DerivativeReport(BaseModel):
    errors: dict[int, float] = Field(default_factory=dict)
    tolerance: float = Field(default=1e-6, gt=0)

    @computed_field
    @property
    def flagged(self) -> list[int]:
        return [order for order, error in self.errors.items() if error > self.tolerance]

    @computed_field
    @property
    def passed(self) -> bool:
        return not self.flagged


class SweepPoint(BaseModel):
    epsilon: float
    successful_iters: int
    total_iters: int
    f_values: int
    derivative_sets: int
    status: ArpccStatus


class SweepResult(BaseModel):
    problem: str
    p: int
    points: list[SweepPoint]
    slope: float
    bound: float
    within_bound: bool


class ProblemSummary(BaseModel):
    name: str
    dim: int
    constraints: int
    feasible_set: str
    f_low: float
    f_up: float | None = None
    lipschitz: dict[int, float] = Field(default_factory=dict)
    description: str


class ConvexSolveRequest(BaseModel):
    problem: str
    p: int = Field(default=2, ge=1, le=3)
    eps: float = Field(default=1e-6, gt=0, le=1)
    sigma0: float = Field(default=1.0, gt=0)
    theta: float = Field(default=100.0, gt=0)
    max_iters: int = Field(default=50_000, gt=0)
    seed: int | None = None


class GeneralSolveRequest(BaseModel):
    problem: str
    p: int = Field(default=2, ge=1, le=3)
    eps_p: float = Field(default=1e-3, gt=0)
    eps_d: float = Field(default=1e-3, gt=0, lt=1)
    delta: float = Field(default=2.0, gt=1)
    beta: float = Field(default=1.0, gt=0)
    sigma0: float = Field(default=1.0, gt=0)
    theta: float = Field(default=100.0, gt=0)
    max_iters: int = Field(default=50_000, gt=0)
    seed: int | None = None


class ConvexSolveResponse(BaseModel):
    run_id: str
    problem: str
    status: ArpccStatus
    x: list[float]
    f: float
    chi: float
    iterations: int
    successful: int
    counters: EvalCounters
    replay_passed: bool


class GeneralSolveResponse(BaseModel):
    run_id: str
    problem: str
    certificate: Certificate
    verified: bool
    counters: EvalCounters
    replay_passed: bool


class SweepRequest(BaseModel):
    problem: str
    p: int = Field(default=2, ge=1, le=3)
    eps_grid: list[float] = Field(default_factory=lambda: [1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
