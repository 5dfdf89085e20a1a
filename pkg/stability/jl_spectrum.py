import logging

from dataclasses import dataclass

import numpy as np

from scipy import linalg

from config import JL_EPS_FACTOR, QUARTET_FACTOR, SIGNATURE_TOL
from .krein import KreinReport, Verdict
from .operators import OperatorMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class JLSpectrumReport:
    eigenvalues: np.ndarray
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
    verdict: Verdict

    @property
    def index(self) -> int:
        return self.k_r + self.k_c + self.k_minus


@dataclass(frozen=True)
class ConsistencyRecord:
    krein_index: int
    direct_index: int
    identity_holds: bool
    resolved: bool
    krein_verdict: Verdict
    direct_verdict: Verdict
    verdicts_agree: bool | None
    finding: str | None


def assemble_JL(L1: OperatorMatrix, L2: OperatorMatrix) -> OperatorMatrix:
    """[[0, -L2], [L1, 0]] acting on stacked pairs (w1, w2)."""
    dim = L1.dim
    entries = np.zeros((2 * dim, 2 * dim))
    entries[:dim, dim:] = -L2.entries
    entries[dim:, :dim] = L1.entries
    basis = tuple(("w1",) + mode for mode in L1.basis) + tuple(("w2",) + mode for mode in L2.basis)
    return OperatorMatrix(entries, False, basis, "JL", L1.sector, L1.N)


def _form(L1: OperatorMatrix, L2: OperatorMatrix, u: np.ndarray, w: np.ndarray) -> complex:
    """<L u, w> for complex stacked vectors, conjugate-linear in u."""
    dim = L1.dim
    return complex(np.conj(u[:dim]) @ (L1.entries @ w[:dim]) + np.conj(u[dim:]) @ (L2.entries @ w[dim:]))


def _clusters(values: np.ndarray, gap: float) -> list[np.ndarray]:
    """Group sorted positions of values whose consecutive spacing is at most gap."""
    order = np.argsort(values)
    groups, current = [], [order[0]] if order.size else []
    for previous, index in zip(order[:-1], order[1:]):
        if values[index] - values[previous] <= gap:
            current.append(index)
        else:
            groups.append(np.array(current))
            current = [index]
    if current:
        groups.append(np.array(current))
    return groups


def quartet_defect(eigenvalues: np.ndarray, eps: float) -> float:
    """Largest distance from -lambda and from conj(lambda) to the spectrum, over nonzero eigenvalues."""
    nonzero = eigenvalues[np.abs(eigenvalues) > eps]
    if nonzero.size == 0:
        return 0.0
    negation = np.min(np.abs(nonzero[:, None] + nonzero[None, :]), axis=1)
    conjugation = np.min(np.abs(np.conj(nonzero)[:, None] - nonzero[None, :]), axis=1)
    return float(max(np.max(negation), np.max(conjugation)))


def squared_spectrum_defect(eigenvalues: np.ndarray, L1: OperatorMatrix, L2: OperatorMatrix) -> float:
    """Relative distance between {lambda^2} and the spectrum of -L2 L1, measured both ways."""
    squares = eigenvalues ** 2
    product = linalg.eigvals(-L2.entries @ L1.entries)
    distances = np.abs(squares[:, None] - product[None, :])
    forward = np.min(distances, axis=1) / (1 + np.abs(squares))
    backward = np.min(distances, axis=0) / (1 + np.abs(product))
    return float(max(np.max(forward), np.max(backward)))


def classify_spectrum(eigenvalues: np.ndarray,
                      eigenvectors: np.ndarray,
                      L1: OperatorMatrix,
                      L2: OperatorMatrix,
                      eps_re: float | None = None,
                      eps_im: float | None = None,
                      signature_tol: float = SIGNATURE_TOL) -> JLSpectrumReport:
    """
    Sort the spectrum of JL into real-unstable, complex-unstable and purely
    imaginary parts. Krein signatures are the inertia of the Hermitian form
    <L w, w> on each cluster of imaginary eigenvalues with positive imaginary
    part; clusters that mix signs are flagged.

    :param eigenvalues: Eigenvalues of JL.
    :param eigenvectors: Matching eigenvectors as columns.
    :param L1: First diagonal block of L.
    :param L2: Second diagonal block of L.
    :param eps_re: Real-part tolerance, 1e-7 (1 + spectral radius) by default.
    :param eps_im: Imaginary-part tolerance, same default.
    :param signature_tol: Magnitude below which a signature is ambiguous.
    :return: The report.
    """
    radius = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    eps_re = JL_EPS_FACTOR * (1 + radius) if eps_re is None else eps_re
    eps_im = JL_EPS_FACTOR * (1 + radius) if eps_im is None else eps_im

    re, im = eigenvalues.real, eigenvalues.imag
    zero = np.abs(eigenvalues) <= eps_re
    k_r = int(np.sum(~zero & (re > eps_re) & (np.abs(im) <= eps_im)))
    k_c = int(np.sum(~zero & (re > eps_re) & (np.abs(im) > eps_im)))

    imaginary = np.flatnonzero(~zero & (np.abs(re) <= eps_re) & (im > eps_im))
    negative_pairs = 0
    ambiguous = 0
    ill_conditioned = 0
    if imaginary.size:
        for cluster in _clusters(im[imaginary], 1e3 * eps_im):
            members = imaginary[cluster]
            vectors = eigenvectors[:, members]
            vectors = vectors / np.linalg.norm(vectors, axis=0)
            gram = np.array([[_form(L1, L2, u, w) for w in vectors.T] for u in vectors.T])
            signatures = linalg.eigvalsh((gram + gram.conj().T) / 2)
            ambiguous += int(np.sum(np.abs(signatures) < signature_tol))
            negative = int(np.sum(signatures <= -signature_tol))
            positive = int(np.sum(signatures >= signature_tol))
            negative_pairs += negative
            if negative and positive and members.size > 1:
                ill_conditioned += 1
                logger.info(f"[JL] imaginary cluster near {im[members[0]]:.6g}i mixes Krein signatures")

    max_real_part = float(np.max(re)) if eigenvalues.size else 0.0
    defect = quartet_defect(eigenvalues, eps_re)
    quartet_tol = QUARTET_FACTOR * (1 + radius)
    verdict = Verdict.STABLE if float(np.max(np.abs(re), initial=0.0)) <= eps_re else Verdict.UNSTABLE

    return JLSpectrumReport(
        eigenvalues=eigenvalues,
        max_real_part=max_real_part,
        k_r=k_r,
        k_c=k_c,
        k_minus=2 * negative_pairs,
        zero_count=int(np.sum(zero)),
        eps_re=float(eps_re),
        eps_im=float(eps_im),
        signature_tol=float(signature_tol),
        ambiguous_signatures=ambiguous,
        ill_conditioned_clusters=ill_conditioned,
        quartet_defect=defect,
        quartet_ok=defect <= quartet_tol,
        squared_defect=squared_spectrum_defect(eigenvalues, L1, L2),
        verdict=verdict,
    )


def jl_report(L1: OperatorMatrix,
              L2: OperatorMatrix,
              eps_re: float | None = None,
              eps_im: float | None = None) -> JLSpectrumReport:
    """Assemble JL, compute its full spectrum and classify it."""
    JL = assemble_JL(L1, L2)
    eigenvalues, eigenvectors = linalg.eig(JL.entries)
    return classify_spectrum(eigenvalues, eigenvectors, L1, L2, eps_re, eps_im)


def verdict_crosscheck(jl: JLSpectrumReport, krein: KreinReport) -> ConsistencyRecord:
    """Compare k_r + k_c + k_- against n(L) - n(V) - z(V) and the two verdicts."""
    resolved = jl.ambiguous_signatures == 0 and krein.obstruction is None
    identity_holds = jl.index == krein.rhs_index

    agree = None
    if krein.verdict is not Verdict.INCONCLUSIVE:
        agree = krein.verdict is jl.verdict

    finding = None
    if not identity_holds:
        finding = (f"k_r + k_c + k_- = {jl.k_r} + {jl.k_c} + {jl.k_minus} = {jl.index} but "
                   f"n(L) - n(V) - z(V) = {krein.nL} - {krein.nV} - {krein.zV} = {krein.rhs_index} "
                   f"(eps_re={jl.eps_re:.3e}, V_tol={krein.V_tol:.3e})")
    elif agree is False:
        finding = f"Index route says {krein.verdict.value}, direct route says {jl.verdict.value}"

    return ConsistencyRecord(krein.rhs_index, jl.index, identity_holds, resolved,
                             krein.verdict, jl.verdict, agree, finding)


__all__ = [
    "JLSpectrumReport",
    "ConsistencyRecord",
    "assemble_JL",
    "quartet_defect",
    "squared_spectrum_defect",
    "classify_spectrum",
    "jl_report",
    "verdict_crosscheck",
]
