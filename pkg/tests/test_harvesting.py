"""Matrix elements, density matrices, negativity, and the duality runner.

Independent cross-checks: a plain Simpson grid in the original coordinates
(no rotated axes, no adaptivity) frozen at a single resolvable regulator, and
the Fourier mode-sum oracle.  Scaling identities are tested bitwise with
power-of-two couplings so exactness claims really are exact.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from takagi_harvest import (
    ConformalTakagiMap,
    DetectorSpec,
    HarvestScenario,
    MatrixElements,
    StaticTrajectory,
    assemble_rho,
    compute_L,
    compute_M,
    compute_N,
    cos_squared_switching,
    duality_backbone_residual,
    dualize,
    gaussian_switching,
    harvest,
    negativity_leading,
    negativity_pt_exact,
    run_dual_check,
    vacuum_bogoliubov,
)
from takagi_harvest.quadrature import IntegralResult, QuadratureConfig

C0 = 0.0078125  # 2^-7: power-of-two coupling makes quadratic scaling exact

GAUSS = gaussian_switching(1.0)


def _detector(label, pos, model="oscillator", c=0.01, freq=1.0, chi=GAUSS):
    return DetectorSpec(
        label=label,
        model=model,
        frequency=freq,
        coupling=c,
        trajectory=StaticTrajectory(pos),
        switching=chi,
    )


def _scenario(model="oscillator", c=0.01, L=5.0, freq=1.0, chi=GAUSS, quad=None):
    da = _detector("A", (0.0, 0.0, 0.0), model, c, freq, chi)
    db = _detector("B", (L, 0.0, 0.0), model, c, freq, chi)
    kw = {} if quad is None else {"quadrature": quad}
    return HarvestScenario(detectors=(da, db), **kw)


def _elements(L_AA, L_BB, M, L_AB=0.0, N_A=None, N_B=None):
    def wrap(v):
        return None if v is None else IntegralResult(value=complex(v), err_estimate=0.0)

    return MatrixElements(
        L_AA=wrap(L_AA), L_BB=wrap(L_BB), M=wrap(M), L_AB=wrap(L_AB),
        N_A=wrap(N_A), N_B=wrap(N_B),
    )


# --- matrix elements ---------------------------------------------------------


def test_L_zero_coupling_short_circuit():
    sc = _scenario(c=0.0)
    res = compute_L(sc.detectors[0], sc.detectors[0], sc)
    assert res.value == 0.0
    assert res.note == "zero-coupling"


def test_L_direct_matches_fourier_oracle():
    sc = _scenario()
    direct = compute_L(sc.detectors[0], sc.detectors[0], sc)
    oracle = 7.088272232636415e-07  # frozen Fourier mode-sum value
    assert abs(direct.value - oracle) / oracle <= 1e-6


def test_L_method_fourier_delegates():
    sc = _scenario(quad=QuadratureConfig(method="fourier"))
    res = compute_L(sc.detectors[0], sc.detectors[1], sc)
    assert res.note == "fourier-oracle"
    assert res.value == pytest.approx(2.0579692753949913e-07, rel=1e-9)


def test_coupling_scaling_exact():
    eps = (0.01,)
    vals = {}
    for s in (1, 2, 3):
        sc = _scenario(model="qubit", c=s * C0)
        vals[s] = (
            compute_L(sc.detectors[0], sc.detectors[0], sc, epsilons=eps).value,
            compute_M(sc, epsilons=eps).value,
        )
    assert vals[2][0] == 4 * vals[1][0] and vals[2][1] == 4 * vals[1][1]
    assert vals[3][0] == 9 * vals[1][0] and vals[3][1] == 9 * vals[1][1]


def test_M_zero_coupling():
    assert compute_M(_scenario(c=0.0)).value == 0.0


def test_M_label_swap_invariant():
    sc = _scenario(model="qubit")
    swapped = HarvestScenario(detectors=sc.detectors[::-1], quadrature=sc.quadrature)
    eps = (0.01, 0.005)
    assert compute_M(sc, epsilons=eps).value == compute_M(swapped, epsilons=eps).value


def test_M_nonzero_while_spacelike():
    # gaussian windows at separation 5: essentially causally disjoint, yet
    # the cross term survives (this is what makes harvesting possible)
    res = compute_M(_scenario(), epsilons=(0.01, 0.005))
    assert abs(res.value) > 1e-7


def test_N_requires_oscillator():
    sc = _scenario(model="qubit")
    with pytest.raises(ValueError):
        compute_N(sc.detectors[0], sc)


def test_N_zero_coupling():
    sc = _scenario(c=0.0)
    assert compute_N(sc.detectors[0], sc).value == 0.0


def test_N_equals_half_sqrt2_of_clone_M():
    # with B a clone of A at the same position, the ordered integrals agree
    # exactly at every regulator: N = (sqrt(2)/2) M_clone
    da = _detector("A", (0.0, 0.0, 0.0))
    db = _detector("B", (0.0, 0.0, 0.0))
    clone = HarvestScenario(detectors=(da, db))
    single = HarvestScenario(detectors=(da, _detector("B", (5.0, 0.0, 0.0))))
    for eps in (1e-2, 5e-3):
        n = compute_N(da, single, epsilons=(eps,)).value
        m = compute_M(clone, epsilons=(eps,)).value
        assert abs(n - 0.5 * math.sqrt(2.0) * m) / abs(n) <= 1e-12


def test_N_coupling_quadruples():
    sc1 = _scenario(c=C0)
    sc2 = _scenario(c=2 * C0)
    eps = (0.01,)
    n1 = compute_N(sc1.detectors[0], sc1, epsilons=eps).value
    n2 = compute_N(sc2.detectors[0], sc2, epsilons=eps).value
    assert n2 == 4 * n1


def test_simpson_cross_check_frozen():
    # Simpson on a 6001^2 grid in unrotated (t, t') coordinates, eps = 0.25,
    # [-8, 8]^2; values frozen from that independent evaluation
    cfg = QuadratureConfig(epsilon_sequence=(0.25,), extrapolation="none")
    sc = _scenario(quad=cfg)
    L = compute_L(sc.detectors[0], sc.detectors[0], sc)
    M = compute_M(sc)
    assert abs(L.value - 6.176241452214257e-07) / 6.176241452214257e-07 <= 1e-8
    m_ref = -2.5884406937599136e-07 + 1.0281040611913585e-08j
    assert abs(M.value - m_ref) / abs(m_ref) <= 1e-7


# --- density matrix and negativity --------------------------------------------


def test_rho_qubit_layout():
    el = _elements(0.01, 0.02, 0.003 + 0.004j, L_AB=0.005 - 0.001j)
    rho = assemble_rho(el, "qubit")
    assert rho.shape == (4, 4)
    assert rho[0, 0] == pytest.approx(1 - 0.03)
    assert rho[1, 1] == 0.01 and rho[2, 2] == 0.02 and rho[3, 3] == 0.0
    assert rho[3, 0] == 0.003 + 0.004j and rho[0, 3] == np.conj(rho[3, 0])
    assert rho[1, 2] == 0.005 - 0.001j and rho[2, 1] == np.conj(rho[1, 2])
    assert rho[1, 0] == 0.0 and rho[2, 3] == 0.0


def test_rho_oscillator_layout():
    el = _elements(0.01, 0.02, 0.003j, L_AB=0.005, N_A=0.001 + 0.002j, N_B=-0.004)
    rho = assemble_rho(el, "oscillator")
    assert rho.shape == (6, 6)
    assert rho[3, 0] == 0.003j
    assert rho[4, 0] == 0.001 + 0.002j and rho[0, 4] == np.conj(rho[4, 0])
    assert rho[5, 0] == -0.004 and rho[0, 5] == -0.004
    assert rho[4, 4] == 0.0 and rho[5, 5] == 0.0


@pytest.mark.parametrize("model", ["qubit", "oscillator"])
def test_rho_trace_and_hermiticity(model):
    el = _elements(0.01, 0.02, 0.003 + 0.004j, L_AB=0.005 - 0.001j,
                   N_A=0.001j, N_B=0.002)
    rho = assemble_rho(el, model)
    assert abs(np.trace(rho) - 1.0) <= 1e-12
    assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12


def test_negativity_closed_form_negative_E1():
    # equal diagonals 0.01, |M| = 0.02: E1 = 0.01 - 0.02 = -0.01
    el = _elements(0.01, 0.01, 0.02)
    E1, neg = negativity_leading(el)
    assert E1 == pytest.approx(-0.01, rel=1e-15)
    assert neg == pytest.approx(0.01, rel=1e-15)


def test_negativity_closed_form_positive_E1():
    # E1 = (0.04 - sqrt(0.0004 + 0.0004))/2 = 0.02 - sqrt(0.0002)
    el = _elements(0.03, 0.01, 0.01)
    E1, neg = negativity_leading(el)
    assert E1 == pytest.approx(0.02 - math.sqrt(2.0) * 0.01, rel=1e-14)
    assert neg == 0.0


def test_negativity_pt_product_state_is_zero():
    el = _elements(0.01, 0.02, 0.0, L_AB=0.0)
    for model in ("qubit", "oscillator"):
        assert negativity_pt_exact(assemble_rho(el, model)) <= 1e-15


def test_negativity_pt_qubit_extra_eigenvalue():
    # the 4x4 partial transpose always carries ~ -|L_AB|^2/(1 - L_AA - L_BB)
    el = _elements(0.01, 0.01, 0.0, L_AB=0.005)
    got = negativity_pt_exact(assemble_rho(el, "qubit"))
    assert got == pytest.approx(0.005**2 / 0.98, rel=1e-3)


# --- model equivalence and subleading structure --------------------------------


@pytest.fixture(scope="module")
def qubit_reports():
    return {c: harvest(_scenario(model="qubit", c=c)) for c in (0.04, 0.02, 0.01)}


@pytest.fixture(scope="module")
def oscillator_report():
    return harvest(_scenario(model="oscillator", c=0.01))


def test_qubit_oscillator_leading_order_bitwise(qubit_reports, oscillator_report):
    q = qubit_reports[0.01]
    o = oscillator_report
    assert q.E1 == o.E1
    assert q.negativity == o.negativity


def test_rho_shapes_by_model(qubit_reports, oscillator_report):
    assert qubit_reports[0.01].rho.shape == (4, 4)
    assert oscillator_report.rho.shape == (6, 6)


def test_pt_extra_eigenvalue_scales_c4(qubit_reports):
    r1 = qubit_reports[0.01].negativity_pt
    r2 = qubit_reports[0.02].negativity_pt
    assert r2 / r1 == pytest.approx(16.0, rel=1e-3)


def test_subleading_ratio_vanishes_quadratically(qubit_reports):
    # |extra PT eigenvalue| / |E1| must drop by 4 per coupling halving
    ratios = {c: rep.negativity_pt / abs(rep.E1) for c, rep in qubit_reports.items()}
    assert ratios[0.04] / ratios[0.02] == pytest.approx(4.0, rel=0.05)
    assert ratios[0.02] / ratios[0.01] == pytest.approx(4.0, rel=0.05)


def test_harvest_report_provenance(qubit_reports):
    rep = qubit_reports[0.01]
    assert rep.provenance == "minkowski/ground"
    assert len(rep.epsilon_sequence) >= 1
    assert rep.elements.N_A is None  # qubits have no N elements


def test_perturbative_warning():
    sc = _scenario(model="qubit", c=5.0, L=1.0)
    with pytest.warns(UserWarning, match="second-order truncation"):
        harvest(sc, epsilons=(0.01,))


# --- validation ----------------------------------------------------------------


def test_detector_spec_validation():
    traj = StaticTrajectory((0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        DetectorSpec("", "qubit", 1.0, 0.01, traj, GAUSS)
    with pytest.raises(ValueError):
        DetectorSpec("A", "spin", 1.0, 0.01, traj, GAUSS)
    with pytest.raises(ValueError):
        DetectorSpec("A", "qubit", -1.0, 0.01, traj, GAUSS)
    with pytest.raises(ValueError):
        DetectorSpec("A", "qubit", 1.0, -0.01, traj, GAUSS)
    with pytest.raises(ValueError):
        DetectorSpec("A", "qubit", 1.0, 0.01, traj, GAUSS, interaction_scale=2.0)
    with pytest.raises(ValueError):
        DetectorSpec("A", "oscillator", 0.0, 0.01, traj, GAUSS)  # needs explicit scale


def test_oscillator_zero_frequency_with_scale():
    traj = StaticTrajectory((0.0, 0.0, 0.0))
    d = DetectorSpec("A", "oscillator", 0.0, 0.01, traj, GAUSS, interaction_scale=1.0)
    with pytest.raises(ValueError):
        d.coupling_effective  # 1/sqrt(2 freq) undefined at freq 0


def test_scenario_validation():
    da = _detector("A", (0.0, 0.0, 0.0))
    db = _detector("B", (5.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        HarvestScenario(detectors=(da,))
    with pytest.raises(ValueError):
        HarvestScenario(detectors=(da, replace(db, label="A")))
    with pytest.raises(ValueError):
        HarvestScenario(detectors=(da, replace(db, model="qubit")))  # mixed pair
    with pytest.raises(ValueError):
        HarvestScenario(detectors=(da, db), frame="frw")  # needs a map
    with pytest.raises(ValueError):
        HarvestScenario(detectors=(da, db), map=ConformalTakagiMap(1.0, 2.0))
    with pytest.raises(ValueError):
        HarvestScenario(detectors=(da, db), initial_state="takagi_squeezed")


# --- duality --------------------------------------------------------------------


@pytest.mark.parametrize("omega,Omega", [(1.0, 2.0), (1.0, 0.5), (2.0, 3.0)])
def test_duality_backbone_pointwise(omega, Omega):
    m = ConformalTakagiMap(omega, Omega)
    lam = np.linspace(-4.3, 4.3, 100)
    assert duality_backbone_residual(m, GAUSS, lam) <= 1e-12


def test_dualize_validation():
    flat = _scenario()
    with pytest.raises(ValueError, match="oscillator"):
        dualize(_scenario(model="qubit"), 2.0)
    da, db = flat.detectors
    uneq = HarvestScenario(detectors=(da, replace(db, frequency=2.0)))
    with pytest.raises(ValueError, match="equal detector frequencies"):
        dualize(uneq, 2.0)
    frw = dualize(flat, 2.0)
    with pytest.raises(ValueError, match="flat"):
        dualize(frw, 3.0)


def test_dualize_power_law_support_check():
    # Omega=0 only covers |omega lam| < pi/2; an 8 sigma gaussian is too wide
    with pytest.raises(ValueError):
        dualize(_scenario(), 0.0)
    narrow = _scenario(chi=cos_squared_switching(-0.5, 0.5))
    dual = dualize(narrow, 0.0)
    assert dual.bogoliubov is None
    assert dual.map.Omega == 0.0


def test_dualize_scenario_shape():
    dual = dualize(_scenario(), 2.0)
    assert dual.frame == "frw"
    assert dual.initial_state == "takagi_squeezed"
    assert dual.map.omega == 1.0 and dual.map.Omega == 2.0
    assert dual.bogoliubov == vacuum_bogoliubov(1.0, 2.0)
    for d in dual.detectors:
        assert d.frequency == 2.0
        assert d.interaction_scale == math.sqrt(2.0)
        assert d.trajectory.frame == "frw"


def test_dual_check_degenerate_collapses():
    rep = run_dual_check(_scenario(), 1.0)
    assert rep.resid_max <= 1e-12


def test_dual_check_nontrivial_pair():
    rep = run_dual_check(_scenario(), 2.0, epsilons=(0.01, 0.005))
    assert rep.resid_max <= 1e-3
    assert set(rep.residuals) == {"L_AA", "L_BB", "abs_M", "negativity"}
    assert rep.bogoliubov == vacuum_bogoliubov(1.0, 2.0)
