from typing import Literal

import numpy as np

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import (
    FORMAT_VERSION,
    MINIMIZER_GRAD_TOL,
    MINIMIZER_MAX_ITERATIONS,
    MINIMIZER_STAGNATION_TOL,
    MINIMIZER_STAGNATION_WINDOW,
    NEWTON_MAX_ITERATIONS,
    NEWTON_TOL,
)
from torus import SectorTag, SpectralField
from waves import Branch, BranchKind, MinimizerRun, WaveBranchPoint
from stability import SpectrumCounts, StabilityAnalysis

# Records reject NaN and infinities on validation
_RECORD_CONFIG = ConfigDict(extra="forbid", allow_inf_nan=False, frozen=True)


class RunConfig(BaseModel):
    """Parameters of one laboratory command. Defaults come from ``config.yaml``."""

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    p: int = Field(1, ge=1)
    branch: BranchKind = BranchKind.SS
    N: int = Field(16, ge=3)

    a: float = 0.0
    order: int = 3
    a_start: float = 0.01
    a_end: float = 0.1
    steps: int = Field(20, ge=1)

    newton_tol: float = Field(NEWTON_TOL, gt=0)
    newton_max_iterations: int = Field(NEWTON_MAX_ITERATIONS, ge=1)
    eigen_tol: float | None = Field(None, gt=0)
    eps_re: float | None = Field(None, gt=0)
    eps_im: float | None = Field(None, gt=0)

    T: float = Field(10.0, gt=0)
    dt: float = Field(1e-3, gt=0)
    epsilon: float = Field(1e-4, ge=0)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    stride: int = Field(100, ge=1)

    c: float = Field(2.5, gt=0)
    constraint_level: float = Field(1.0, gt=0)
    restriction: BranchKind | None = None
    grad_tol: float = Field(MINIMIZER_GRAD_TOL, gt=0)
    stagnation_tol: float = Field(MINIMIZER_STAGNATION_TOL, ge=0)
    stagnation_window: int = Field(MINIMIZER_STAGNATION_WINDOW, ge=1)
    max_iterations: int = Field(MINIMIZER_MAX_ITERATIONS, ge=1)

    workers: int = Field(1, ge=1)
    output_dir: str | None = None

    @property
    def sector(self) -> SectorTag:
        return self.branch.sector

    @model_validator(mode="after")
    def check_amplitude_range(self):
        if self.a_start < 0 or self.a < 0:
            raise ValueError("amplitudes must be non-negative")
        return self


class WaveRecord(BaseModel):
    """One wave on disk. ``cc`` and ``ss`` are row-major flattenings of the coefficient blocks."""

    model_config = _RECORD_CONFIG

    format_version: int = FORMAT_VERSION
    p: int = Field(ge=1)
    sector: SectorTag
    branch: BranchKind
    N: int = Field(ge=3)
    a: float
    c: float
    cc: list[float]
    ss: list[float] | None = None

    @field_validator("format_version")
    @classmethod
    def check_version(cls, value: int) -> int:
        if value != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {value}, expected {FORMAT_VERSION}")
        return value

    @model_validator(mode="after")
    def check_blocks(self):
        if self.sector is not self.branch.sector:
            raise ValueError(f"branch {self.branch.value} lives in sector {self.branch.sector.value}")
        if len(self.cc) != (self.N + 1) ** 2:
            raise ValueError(f"cc must hold (N+1)^2 = {(self.N + 1) ** 2} values, got {len(self.cc)}")
        if self.sector is SectorTag.S and self.ss is not None:
            raise ValueError("S-sector waves carry no ss block")
        if self.sector is SectorTag.E and (self.ss is None or len(self.ss) != self.N ** 2):
            raise ValueError(f"E-sector waves need an ss block of N^2 = {self.N ** 2} values")
        return self

    @classmethod
    def from_point(cls, point: WaveBranchPoint) -> "WaveRecord":
        field = point.field
        return cls(
            p=point.p,
            sector=field.sector,
            branch=point.branch,
            N=field.N,
            a=point.a,
            c=point.c,
            cc=field.cc.ravel().tolist(),
            ss=None if field.ss is None else field.ss.ravel().tolist(),
        )

    def to_field(self) -> SpectralField:
        cc = np.reshape(self.cc, (self.N + 1, self.N + 1))
        ss = None if self.ss is None else np.reshape(self.ss, (self.N, self.N))
        return SpectralField(self.sector, cc, ss)

    def to_point(self) -> WaveBranchPoint:
        return WaveBranchPoint.from_field(self.p, self.branch, self.to_field(), self.c, self.a)


class BranchPointRecord(BaseModel):
    model_config = _RECORD_CONFIG

    a: float
    c: float
    residual: float
    nodal_min: float
    iterations: int
    cc: list[float]
    ss: list[float] | None = None


class BranchRecord(BaseModel):
    model_config = _RECORD_CONFIG

    format_version: int = FORMAT_VERSION
    p: int = Field(ge=1)
    sector: SectorTag
    branch: BranchKind
    N: int = Field(ge=3)
    step: float
    newton_tol: float = Field(gt=0)
    status: Literal["complete", "aborted"]
    error: str | None = None
    points: list[BranchPointRecord]

    @field_validator("format_version")
    @classmethod
    def check_version(cls, value: int) -> int:
        if value != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {value}, expected {FORMAT_VERSION}")
        return value

    @model_validator(mode="after")
    def check_points(self):
        for i, point in enumerate(self.points):
            if len(point.cc) != (self.N + 1) ** 2:
                raise ValueError(f"point {i}: cc must hold {(self.N + 1) ** 2} values")
            if (point.ss is None) != (self.sector is SectorTag.S):
                raise ValueError(f"point {i}: ss block does not match sector {self.sector.value}")
        return self

    @classmethod
    def from_branch(cls, branch: Branch) -> "BranchRecord":
        points = [
            BranchPointRecord(
                a=point.a,
                c=point.c,
                residual=point.residual,
                nodal_min=point.nodal_min,
                iterations=point.iterations,
                cc=point.field.cc.ravel().tolist(),
                ss=None if point.field.ss is None else point.field.ss.ravel().tolist(),
            )
            for point in branch.points
        ]
        return cls(p=branch.p, sector=branch.sector, branch=branch.branch, N=branch.N, step=branch.step,
                   newton_tol=branch.newton_tol, status=branch.status, error=branch.error, points=points)

    def wave_records(self) -> list[WaveRecord]:
        return [
            WaveRecord(p=self.p, sector=self.sector, branch=self.branch, N=self.N,
                       a=point.a, c=point.c, cc=point.cc, ss=point.ss)
            for point in self.points
        ]


class SpectrumRecord(BaseModel):
    model_config = _RECORD_CONFIG

    n: int
    z: int
    positive: int
    tol: float

    @classmethod
    def from_counts(cls, counts: SpectrumCounts) -> "SpectrumRecord":
        return cls(n=counts.n, z=counts.z, positive=counts.positive, tol=counts.tol)


class KreinRecord(BaseModel):
    model_config = _RECORD_CONFIG

    zL: int
    nL: int
    nV: int
    zV: int
    V: list[list[float]]
    V_tol: float
    V_symmetry_defect: float
    rhs_index: int
    verdict: str
    inconsistent: bool
    orthogonality_premise: bool
    orthogonality_defect: float
    obstruction: int | None = None


class JLRecord(BaseModel):
    model_config = _RECORD_CONFIG

    max_real_part: float
    k_r: int
    k_c: int
    k_minus: int
    zero_count: int
    eps_re: float
    eps_im: float
    signature_tol: float
    ambiguous_signatures: int
    ill_conditioned_clusters: int
    quartet_defect: float
    quartet_ok: bool
    squared_defect: float
    verdict: str


class ConsistencyModel(BaseModel):
    model_config = _RECORD_CONFIG

    krein_index: int
    direct_index: int
    identity_holds: bool
    resolved: bool
    krein_verdict: str
    direct_verdict: str
    verdicts_agree: bool | None
    finding: str | None


class ComparisonRecord(BaseModel):
    model_config = _RECORD_CONFIG

    quantity: str
    expected: int | float | str
    computed: int | float | str
    match: bool


class StabilityReport(BaseModel):
    """Both stability routes for one wave, with the tolerances that gated every count."""

    model_config = _RECORD_CONFIG

    format_version: int = FORMAT_VERSION
    p: int
    sector: SectorTag
    branch: BranchKind
    a: float
    c: float
    N: int
    eigen_tol_override: float | None = None
    L1: SpectrumRecord
    L2: SpectrumRecord
    L: SpectrumRecord
    symmetrization_defect: float
    krein: KreinRecord
    jl: JLRecord
    consistency: ConsistencyModel
    inverse_form: float | None
    L2_kernel_residual: float
    L2_complement_minimum: float
    comparison: list[ComparisonRecord]

    @classmethod
    def from_analysis(cls, analysis: StabilityAnalysis, eigen_tol: float | None = None) -> "StabilityReport":
        krein, jl, consistency = analysis.krein, analysis.jl, analysis.consistency
        return cls(
            p=analysis.p,
            sector=analysis.sector,
            branch=analysis.branch,
            a=analysis.a,
            c=analysis.c,
            N=analysis.N,
            eigen_tol_override=eigen_tol,
            L1=SpectrumRecord.from_counts(analysis.L1_counts),
            L2=SpectrumRecord.from_counts(analysis.L2_counts),
            L=SpectrumRecord.from_counts(analysis.L_counts),
            symmetrization_defect=analysis.symmetrization_defect,
            krein=KreinRecord(
                zL=krein.zL,
                nL=krein.nL,
                nV=krein.nV,
                zV=krein.zV,
                V=krein.V.tolist(),
                V_tol=krein.V_tol,
                V_symmetry_defect=krein.V_symmetry_defect,
                rhs_index=krein.rhs_index,
                verdict=krein.verdict.value,
                inconsistent=krein.inconsistent,
                orthogonality_premise=krein.orthogonality_premise,
                orthogonality_defect=krein.orthogonality_defect,
                obstruction=krein.obstruction,
            ),
            jl=JLRecord(
                max_real_part=jl.max_real_part,
                k_r=jl.k_r,
                k_c=jl.k_c,
                k_minus=jl.k_minus,
                zero_count=jl.zero_count,
                eps_re=jl.eps_re,
                eps_im=jl.eps_im,
                signature_tol=jl.signature_tol,
                ambiguous_signatures=jl.ambiguous_signatures,
                ill_conditioned_clusters=jl.ill_conditioned_clusters,
                quartet_defect=jl.quartet_defect,
                quartet_ok=jl.quartet_ok,
                squared_defect=jl.squared_defect,
                verdict=jl.verdict.value,
            ),
            consistency=ConsistencyModel(
                krein_index=consistency.krein_index,
                direct_index=consistency.direct_index,
                identity_holds=consistency.identity_holds,
                resolved=consistency.resolved,
                krein_verdict=consistency.krein_verdict.value,
                direct_verdict=consistency.direct_verdict.value,
                verdicts_agree=consistency.verdicts_agree,
                finding=consistency.finding,
            ),
            inverse_form=analysis.inverse_form,
            L2_kernel_residual=analysis.L2_kernel_residual,
            L2_complement_minimum=analysis.L2_complement_minimum,
            comparison=[
                ComparisonRecord(quantity=item.quantity, expected=item.expected,
                                 computed=item.computed, match=item.match)
                for item in analysis.comparison
            ],
        )

    def table_row(self) -> dict:
        """One row of the merged report table."""
        return {
            "p": self.p,
            "sector": self.sector.value,
            "branch": self.branch.value,
            "a": self.a,
            "c": self.c,
            "nL1": self.L1.n,
            "zL1": self.L1.z,
            "nL2": self.L2.n,
            "zL2": self.L2.z,
            "nV": self.krein.nV,
            "zV": self.krein.zV,
            "rhs_index": self.krein.rhs_index,
            "k_r": self.jl.k_r,
            "k_c": self.jl.k_c,
            "k_minus": self.jl.k_minus,
            "krein_verdict": self.krein.verdict,
            "direct_verdict": self.jl.verdict,
            "identity": self.consistency.identity_holds,
        }


class MinimizerRecord(BaseModel):
    model_config = _RECORD_CONFIG

    format_version: int = FORMAT_VERSION
    p: int
    c: float
    constraint_level: float
    seed: int
    N: int
    restriction: BranchKind | None
    grad_tol: float
    stagnation_tol: float
    iterations: int
    converged: bool
    termination: str
    B_value: float
    gradient_norm: float
    nodal_min: float
    multiplier: float
    rescaled_B: float
    rescaled_constraint: float
    rescaled_residual: float
    constant_B: float
    field: WaveRecord

    @classmethod
    def from_run(cls, run: MinimizerRun, grad_tol: float, stagnation_tol: float) -> "MinimizerRecord":
        branch = run.restriction or (BranchKind.SS if run.field.sector is SectorTag.S else BranchKind.EPLUS)
        field = WaveRecord(p=run.p, sector=run.field.sector, branch=branch, N=run.field.N,
                           a=0.0, c=run.c, cc=run.field.cc.ravel().tolist(),
                           ss=None if run.field.ss is None else run.field.ss.ravel().tolist())
        return cls(
            p=run.p,
            c=run.c,
            constraint_level=run.constraint_level,
            seed=run.seed,
            N=run.field.N,
            restriction=run.restriction,
            grad_tol=grad_tol,
            stagnation_tol=stagnation_tol,
            iterations=run.iterations,
            converged=run.converged,
            termination=run.termination,
            B_value=run.B_value,
            gradient_norm=float(run.gradient_norm),
            nodal_min=run.nodal_min,
            multiplier=run.multiplier,
            rescaled_B=run.rescaled_B,
            rescaled_constraint=run.rescaled_constraint,
            rescaled_residual=run.rescaled_residual,
            constant_B=run.constant_B,
            field=field,
        )


__all__ = [
    "RunConfig",
    "WaveRecord",
    "BranchPointRecord",
    "BranchRecord",
    "SpectrumRecord",
    "KreinRecord",
    "JLRecord",
    "ConsistencyModel",
    "ComparisonRecord",
    "StabilityReport",
    "MinimizerRecord",
]
