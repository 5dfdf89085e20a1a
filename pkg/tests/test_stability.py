import os
import sys

import numpy as np
import pytest

# Add the root directory to sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from stability import *
from errors import ContractViolation
from torus import SectorTag, SpectralField
from waves import BranchKind, WaveBranchPoint, newton_solve_fixed_amplitude, stokes_wave


def converged_wave(branch: BranchKind, a: float, N: int = 6) -> WaveBranchPoint:
    guess = WaveBranchPoint.from_stokes(stokes_wave(1, branch, a, 3, N))
    return newton_solve_fixed_amplitude(guess)


@pytest.fixture(scope="module")
def ss_analysis() -> StabilityAnalysis:
    return analyze_wave(converged_wave(BranchKind.SS, 0.05))


@pytest.fixture(scope="module")
def equilibrium_analysis() -> StabilityAnalysis:
    field = SpectralField.constant(2.0, SectorTag.S, 4)
    return analyze_wave(WaveBranchPoint.from_field(1, BranchKind.SS, field, 2.0, a=0.0))


def test_krein_verdict_rules():
    assert krein_verdict(0, 0, 0) == (0, Verdict.STABLE, False)
    assert krein_verdict(3, 1, 0) == (2, Verdict.INCONCLUSIVE, False)
    assert krein_verdict(4, 1, 0) == (3, Verdict.UNSTABLE, False)
    assert krein_verdict(1, 1, 1) == (-1, Verdict.INCONCLUSIVE, True)


def test_apply_J():
    stacked = np.array([[1.0], [2.0], [3.0], [4.0]])
    np.testing.assert_allclose(apply_J(stacked), [[-3.0], [-4.0], [1.0], [2.0]])


def test_quartet_defect():
    symmetric = np.array([1 + 2j, 1 - 2j, -1 + 2j, -1 - 2j, 3j, -3j, 0.0])
    assert quartet_defect(symmetric, 1e-9) == pytest.approx(0.0)
    assert quartet_defect(np.array([1.0, -1.5]), 1e-9) == pytest.approx(0.5)


def test_equilibrium_index_bookkeeping(equilibrium_analysis):
    analysis = equilibrium_analysis
    assert (analysis.L1_counts.n, analysis.L1_counts.z) == (3, 1)
    assert analysis.L2_counts.z == 1

    krein = analysis.krein
    assert krein.zL == 2
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(krein.V)), [-0.5, 0.5], atol=1e-10)
    assert (krein.nV, krein.zV) == (1, 0)
    assert krein.rhs_index == 2
    assert krein.verdict is Verdict.INCONCLUSIVE
    assert krein.orthogonality_premise


def test_equilibrium_direct_spectrum(equilibrium_analysis):
    jl = equilibrium_analysis.jl
    # Modes with k^2 + j^2 = 1 give lambda^2 = 1
    assert jl.k_r == 2
    assert jl.k_c == 0
    assert jl.k_minus == 0
    assert jl.max_real_part == pytest.approx(1.0, abs=1e-8)
    assert jl.verdict is Verdict.UNSTABLE
    assert jl.quartet_ok
    assert equilibrium_analysis.consistency.identity_holds


def test_small_ss_wave(ss_analysis):
    analysis = ss_analysis
    assert analysis.L1_counts.n == 4
    assert (analysis.L2_counts.n, analysis.L2_counts.z) == (0, 1)
    assert analysis.krein.zL == 1
    assert analysis.krein.nV == 1
    assert analysis.krein.rhs_index == 3
    assert analysis.krein.verdict is Verdict.UNSTABLE

    assert analysis.jl.k_r == 3
    assert analysis.jl.verdict is Verdict.UNSTABLE
    assert analysis.jl.squared_defect < 1e-6

    consistency = analysis.consistency
    assert consistency.identity_holds
    assert consistency.verdicts_agree
    assert consistency.finding is None


def test_inverse_form_is_negative(ss_analysis):
    assert ss_analysis.inverse_form < 0
    assert ss_analysis.L2_kernel_residual < 1e-8
    assert ss_analysis.L2_complement_minimum > 0


def test_comparison_block_records_published_claims(ss_analysis):
    items = {item.quantity: item for item in ss_analysis.comparison}
    assert items["n(L1)"].expected == 1
    assert items["n(L1)"].computed == 4
    assert not items["n(L1)"].match
    assert items["z(L2)"].match
    assert items["c > 2/p"].computed == "false"


def test_e_sector_pair_share_verdicts():
    plus = analyze_wave(converged_wave(BranchKind.EPLUS, 0.05, N=5))
    minus = analyze_wave(converged_wave(BranchKind.EMINUS, 0.05, N=5))
    assert plus.L1_counts.n == minus.L1_counts.n
    assert plus.jl.k_r == minus.jl.k_r
    assert plus.krein.verdict is minus.krein.verdict
    assert plus.jl.verdict is minus.jl.verdict
    assert plus.consistency.identity_holds
    assert minus.consistency.identity_holds


def test_unsolved_stokes_wave_is_rejected():
    truncated = WaveBranchPoint.from_stokes(stokes_wave(1, BranchKind.SS, 0.05, 3, 6))
    assert not truncated.is_converged()
    with pytest.raises(ContractViolation):
        analyze_wave(truncated)


def test_missing_phase_kernel_is_flagged():
    analysis = analyze_wave(converged_wave(BranchKind.SS, 0.05), eigen_tol=1e-30)
    assert analysis.L2_counts.z == 0
    assert not analysis.consistency.resolved
    assert "z(L2) = 0" in analysis.consistency.finding


def test_e_sector_equilibrium_index_bookkeeping():
    field = SpectralField.constant(2.0, SectorTag.E, 4)
    analysis = analyze_wave(WaveBranchPoint.from_field(1, BranchKind.EPLUS, field, 2.0, a=0.0))
    assert (analysis.L1_counts.n, analysis.L1_counts.z) == (3, 2)
    assert analysis.L2_counts.z == 1

    krein = analysis.krein
    assert krein.zL == 3
    assert krein.V.shape == (3, 3)
    np.testing.assert_allclose(krein.V, krein.V.T, atol=1e-12)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(krein.V)), [-0.5, 0.5, 0.5], atol=1e-10)
    assert (krein.nL, krein.nV, krein.zV) == (3, 1, 0)
    assert krein.rhs_index == 2
    assert krein.verdict is Verdict.INCONCLUSIVE

    assert analysis.jl.k_r == 2
    assert analysis.jl.verdict is Verdict.UNSTABLE
    assert analysis.consistency.identity_holds


def test_inverse_form_leading_order(ss_analysis):
    # -1/2 d/dc of the mass 16 pi^2 - 4/3 pi^2 a^2 along a^2 = 48 (2 - c)
    assert ss_analysis.inverse_form == pytest.approx(-32 * np.pi ** 2, rel=1e-2)
    items = {item.quantity: item for item in ss_analysis.comparison}
    assert items["(L1^-1 phi, phi)"].expected == pytest.approx(-4 * ss_analysis.c * np.pi ** 2)
    assert not items["(L1^-1 phi, phi)"].match
