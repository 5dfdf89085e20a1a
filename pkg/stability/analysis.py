import logging

from dataclasses import dataclass, replace

from config import NEWTON_TOL
from errors import ContractViolation, SolvabilityError
from torus import SectorTag, l2_norm
from waves import (
    BranchKind,
    WaveBranchPoint,
    bifurcation_frequency,
    closed_form_c2,
    expected_inverse_form,
    solvability_c2,
)
from .jl_spectrum import ConsistencyRecord, JLSpectrumReport, jl_report, verdict_crosscheck
from .krein import KreinReport, Verdict, analyze_krein
from .operators import (
    SpectrumCounts,
    apply_operator,
    assemble_L,
    assemble_L1,
    assemble_L2,
    complement_minimum,
    eig_sym,
    quadratic_form_inverse,
)

logger = logging.getLogger(__name__)

# Relative agreement required of published leading-order values
LEADING_ORDER_TOL = 0.2


@dataclass(frozen=True)
class ComparisonItem:
    quantity: str
    expected: float | int | str
    computed: float | int | str
    match: bool


@dataclass(frozen=True, eq=False)
class StabilityAnalysis:
    p: int
    branch: BranchKind
    a: float
    c: float
    N: int
    L1_counts: SpectrumCounts
    L2_counts: SpectrumCounts
    L_counts: SpectrumCounts
    symmetrization_defect: float
    krein: KreinReport
    jl: JLSpectrumReport
    consistency: ConsistencyRecord
    inverse_form: float | None
    L2_kernel_residual: float
    L2_complement_minimum: float
    comparison: tuple[ComparisonItem, ...]

    @property
    def sector(self) -> SectorTag:
        return self.branch.sector


def _comparison(wave: WaveBranchPoint,
                L1_counts: SpectrumCounts,
                L2_counts: SpectrumCounts,
                krein: KreinReport,
                jl: JLSpectrumReport,
                inverse_form: float | None) -> tuple[ComparisonItem, ...]:
    """Published claims for small-amplitude waves next to the computed values."""
    p, branch, c = wave.p, wave.branch, wave.c
    items = [
        ComparisonItem("n(L1)", 1, L1_counts.n, L1_counts.n == 1),
        ComparisonItem("n(L2)", 0, L2_counts.n, L2_counts.n == 0),
        ComparisonItem("z(L2)", 1, L2_counts.z, L2_counts.z == 1),
        ComparisonItem("verdict (index route)", Verdict.STABLE.value, krein.verdict.value,
                       krein.verdict is Verdict.STABLE),
        ComparisonItem("verdict (direct route)", Verdict.STABLE.value, jl.verdict.value,
                       jl.verdict is Verdict.STABLE),
        ComparisonItem("c > 2/p", "true", str(c > bifurcation_frequency(p)).lower(),
                       c > bifurcation_frequency(p)),
    ]

    published = closed_form_c2(p, branch)
    if published is not None:
        projected = solvability_c2(p, branch)
        items.append(ComparisonItem("c2", published, projected,
                                    abs(published - projected) <= 1e-10 * max(1.0, abs(projected))))

    expected = expected_inverse_form(p, branch, c)
    if inverse_form is not None:
        items.append(ComparisonItem("(L1^-1 phi, phi)", expected, inverse_form,
                                    abs(inverse_form - expected) <= LEADING_ORDER_TOL * abs(expected)))
    return tuple(items)


def analyze_wave(wave: WaveBranchPoint,
                 eigen_tol: float | None = None,
                 eps_re: float | None = None,
                 eps_im: float | None = None,
                 tol: float = NEWTON_TOL) -> StabilityAnalysis:
    """
    Run both stability routes on a converged wave.

    :param wave: The wave.
    :param eigen_tol: Kernel tolerance override for L1, L2 and L.
    :param eps_re: Real-part tolerance override for the spectrum of JL.
    :param eps_im: Imaginary-part tolerance override for the spectrum of JL.
    :param tol: Residual tolerance the wave must meet, relative to max(1, ||phi||).
    :return: The combined analysis.
    """
    label = f"[Stability p={wave.p} {wave.branch.value} a={wave.a:.4g}]"
    if not wave.is_converged(tol):
        raise ContractViolation(f"{label} residual {wave.residual:.3e} is above the tolerance {tol:.1e}; "
                                f"solve the wave with Newton before analysing it.")

    L1 = assemble_L1(wave)
    L2 = assemble_L2(wave)
    L1_counts = eig_sym(L1, eigen_tol)
    L2_counts = eig_sym(L2, eigen_tol)
    L_counts = eig_sym(assemble_L(L1, L2), eigen_tol)

    krein = analyze_krein(wave.field, L_counts.n, L1_counts, L2_counts)
    jl = jl_report(L1, L2, eps_re, eps_im)
    consistency = verdict_crosscheck(jl, krein)
    if L2_counts.z != 1:
        # phi spans the phase-rotation kernel of L2
        kernel_finding = f"z(L2) = {L2_counts.z}, expected 1 (kernel tolerance {L2_counts.tol:.3e})"
        finding = "; ".join(text for text in (consistency.finding, kernel_finding) if text)
        consistency = replace(consistency, resolved=False, finding=finding)
    if consistency.finding:
        logger.warning(f"{label} {consistency.finding}")

    try:
        inverse_form = quadratic_form_inverse(L1, wave.field, L1_counts)
    except SolvabilityError as e:
        logger.warning(f"{label} phi is not in the range of L1: {e}")
        inverse_form = None

    logger.info(f"{label} n(L1)={L1_counts.n} n(L2)={L2_counts.n} z(L2)={L2_counts.z} "
                f"index={krein.rhs_index} k=({jl.k_r},{jl.k_c},{jl.k_minus}) "
                f"verdicts=({krein.verdict.value},{jl.verdict.value})")

    return StabilityAnalysis(
        p=wave.p,
        branch=wave.branch,
        a=wave.a,
        c=wave.c,
        N=wave.N,
        L1_counts=L1_counts,
        L2_counts=L2_counts,
        L_counts=L_counts,
        symmetrization_defect=max(L1.symmetrization_defect, L2.symmetrization_defect),
        krein=krein,
        jl=jl,
        consistency=consistency,
        inverse_form=inverse_form,
        L2_kernel_residual=l2_norm(apply_operator(L2, wave.field)),
        L2_complement_minimum=complement_minimum(L2, wave.field),
        comparison=_comparison(wave, L1_counts, L2_counts, krein, jl, inverse_form),
    )


__all__ = [
    "ComparisonItem",
    "StabilityAnalysis",
    "analyze_wave",
]
