import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import pochhammer
from r2spectra.chain import ChainSeq, ParamSeq, minimal_params
from r2spectra.errors import (IdentityViolationError, InvalidFamilyError, InvalidVerblunskyError,
                              NotAChainSequenceError)
from r2spectra.poly import Poly
from r2spectra.recurrence import builtin, generate_first
from r2spectra.unit_circle import (
    VerblunskyData,
    alpha_from,
    beta_complementary,
    family_inputs,
    gamma_from,
    paraorthogonal,
    phi_from_family,
    phi_from_p,
    r_from_p,
    szego,
    tau_seq,
    x_of_xi,
    xi_of_x,
)
from r2spectra.zeros import all_roots

N = 30
CODILATED = {1: (0.0, 0.5)}  # lambda_2 halved in the shifted family


def test_cayley_maps_are_inverse():
    x = np.linspace(-20, 20, 41)
    assert np.max(np.abs(x_of_xi(xi_of_x(x)) - x)) <= 1e-12
    xi = np.exp(1j * np.linspace(0.1, 2 * np.pi - 0.1, 37))
    assert np.max(np.abs(xi_of_x(x_of_xi(xi)) - xi)) <= 1e-12
    assert np.max(np.abs(np.abs(xi_of_x(x)) - 1)) <= 1e-15


# ---------------------------------------------------------------- tau

def test_tau_for_zero_c():
    assert np.all(tau_seq(lambda n: 0.0, 10) == 1)


def test_tau_for_alternating_c():
    c = 0.7
    tau = tau_seq(lambda n: (-1) ** n * c, 12)
    w = (1 + 1j * c) / (1 - 1j * c)  # c_1 = -c
    assert np.allclose(tau[1::2], w, atol=1e-15, rtol=0)
    assert np.allclose(tau[0::2], 1.0, atol=1e-15, rtol=0)


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=40))
def test_tau_unimodular(cs):
    tau = tau_seq(np.array(cs), len(cs))
    assert np.max(np.abs(np.abs(tau) - 1)) <= 1e-12


# -------------------------------------------------------------- alpha

def test_alpha_vanishes_for_half_start_family():
    v = VerblunskyData.from_family(builtin("lambda2half"), N)
    assert np.max(np.abs(v.alpha)) <= 1e-12
    v.check()


def test_alpha_of_quarter_chain():
    l = minimal_params(ChainSeq.constant(0.25), N + 1)
    alpha = alpha_from(l, lambda n: 0.0, N)
    n = np.arange(1, N + 1)
    assert np.max(np.abs(alpha + 1 / (n + 1))) <= 1e-12


@pytest.mark.parametrize("zeta", [0.5, 10.0, 25.0])
def test_alpha_for_crr_without_drift(zeta):
    v = VerblunskyData.from_family(builtin("crr", zeta=zeta, theta=0.0), N)
    ref = np.array([-pochhammer(zeta + 1, n) / pochhammer(zeta + 2, n) for n in range(1, N + 1)])
    assert np.max(np.abs(v.alpha - ref)) <= 1e-12
    assert np.all(v.tau == 1)


@pytest.mark.parametrize("name", ["example1", "lambda2half", "crr"])
def test_alpha_in_unit_disc(name):
    VerblunskyData.from_family(builtin(name), 40).check()


def test_non_special_family_is_rejected():
    with pytest.raises(InvalidFamilyError):
        family_inputs(builtin("chebyshev_r2"), 5)


# ----------------------------------------------------------- gamma / eta

def test_gamma_after_halving_lambda2():
    fam = builtin("lambda2half")
    gamma, eta = gamma_from(fam, fam.modified(CODILATED), 1, N)
    n = np.arange(1, N + 1)
    assert np.max(np.abs(gamma + 1 / (n + 1))) <= 1e-12
    assert np.all(eta == 1)


def test_gamma_without_perturbation_is_alpha():
    fam = builtin("crr")
    gamma, eta = gamma_from(fam, fam.modified({3: (0.0, 1.0)}), 3, N)
    v = VerblunskyData.from_family(fam, N)
    assert np.max(np.abs(gamma - v.alpha)) <= 1e-14
    assert np.max(np.abs(eta - v.tau)) <= 1e-15


@pytest.mark.parametrize("k,nu", [(1, 0.5), (3, 0.8), (4, 0.3)])
def test_gamma_for_codilation_shifts_alpha_by_parameter_change(k, nu):
    fam = builtin("example1")
    pert = fam.modified({k: (0.0, nu)})
    gamma, _ = gamma_from(fam, pert, k, N)
    _, l = family_inputs(fam, N)
    _, lp = family_inputs(pert, N)
    alpha = VerblunskyData.from_family(fam, N).alpha
    n = np.arange(1, N + 1)
    shift = 2 * (l.values[n] - lp.values[n])  # l_{n+1} - l'_{n+1}
    assert np.max(np.abs(gamma - (alpha - shift))) <= 1e-12


@pytest.mark.parametrize("name,k,mu,nu", [("crr", 2, 0.7, 0.9), ("crr", 5, -1.1, 1.2),
                                          ("example1", 3, 0.4, 0.6)])
def test_gamma_matches_alpha_of_perturbed_family(name, k, mu, nu):
    fam = builtin(name)
    pert = fam.modified({k: (mu, nu)})
    gamma, eta = gamma_from(fam, pert, k, N)
    v = VerblunskyData.from_family(pert, N)
    assert np.max(np.abs(gamma - v.alpha)) <= 1e-12
    assert np.max(np.abs(eta - v.tau)) <= 1e-12
    assert np.all(np.abs(gamma) < 1)


def test_raising_a_quarter_chain_value_is_not_a_chain():
    fam = builtin("example1")
    with pytest.raises(NotAChainSequenceError):
        gamma_from(fam, fam.modified({4: (0.0, 1.3)}), 4, N)


def test_gamma_rejects_families_differing_elsewhere():
    fam = builtin("crr")
    with pytest.raises(ValueError):
        gamma_from(fam, fam.modified({2: (0.3, 1.0)}), 4, 10)


# ---------------------------------------------------------------- beta

@pytest.mark.parametrize("name", ["example1", "lambda2half"])
def test_beta_is_minus_alpha_without_drift(name):
    c, l = family_inputs(builtin(name), N)
    assert np.max(np.abs(beta_complementary(l, c, N) + alpha_from(l, c, N))) <= 1e-12


def test_beta_is_minus_alpha_for_crr_without_drift():
    c, l = family_inputs(builtin("crr", zeta=10.0, theta=0.0), N)
    assert np.max(np.abs(beta_complementary(l, c, N) + alpha_from(l, c, N))) <= 1e-12


@given(st.lists(st.floats(-5, 5), min_size=N + 1, max_size=N + 1), st.floats(0.01, 0.25))
def test_beta_is_a_rotation_of_conjugate_alpha(cs, lam):
    c = np.array(cs)
    l = minimal_params(ChainSeq.constant(lam), N + 1)
    alpha, beta = alpha_from(l, c, N), beta_complementary(l, c, N)
    tau = tau_seq(c, N + 1)
    ref = -np.conj(alpha) * np.conj(tau[1:N + 1]) * np.conj(tau[2:N + 2])
    assert np.max(np.abs(beta - ref)) <= 1e-12
    assert np.all(np.abs(beta) < 1 + 1e-12)


@pytest.mark.parametrize("cval", [0.3, 1.7])
def test_beta_for_alternating_drift(cval):
    c = lambda n: (-1) ** n * cval
    l = minimal_params(ChainSeq.constant(0.2), N + 1)
    alpha, beta = alpha_from(l, c, N), beta_complementary(l, c, N)
    ref = -(1 - 1j * cval) / (1 + 1j * cval) * np.conj(alpha)
    assert np.max(np.abs(beta - ref)) <= 1e-12


def test_beta_for_alternating_drift_is_not_a_multiple_of_alpha():
    # beta = -((1+ic)/(1-ic)) alpha without conjugation does not hold
    cval = 0.3
    c = lambda n: (-1) ** n * cval
    l = minimal_params(ChainSeq.constant(0.2), N + 1)
    alpha, beta = alpha_from(l, c, N), beta_complementary(l, c, N)
    assert np.max(np.abs(beta + (1 + 1j * cval) / (1 - 1j * cval) * alpha)) > 0.1


# --------------------------------------------------------------- Szego

def test_szego_zero_alpha():
    phis = szego(np.zeros(8), 8)
    for n, p in enumerate(phis):
        assert p.allclose(Poly([0] * n + [1]), rtol=0)


def test_szego_first_step():
    a = 0.3 - 0.4j
    assert szego([a], 1)[1].allclose(Poly([-np.conj(a), 1]))


def test_szego_for_quarter_chain_alpha():
    alpha = -1 / (np.arange(N) + 2.0)
    for n, p in enumerate(szego(alpha, 15)):
        ref = Poly((np.arange(n + 1) + 1) / (n + 1))
        assert p.allclose(ref, rtol=1e-13)


def test_szego_rejects_alpha_outside_disc():
    with pytest.raises(InvalidVerblunskyError):
        szego([0.1, 1.0], 2)


# ---------------------------------------------------------- P -> r -> phi

def test_r_for_half_start_family():
    P = generate_first(builtin("lambda2half"), 12)
    for n in range(1, 12):
        ref = Poly([1] + [0] * (n - 1) + [1])
        assert r_from_p(P[n], n).allclose(ref, rtol=1e-10)


def test_r_for_codilated_family():
    fam = builtin("lambda2half")
    P = generate_first(fam.modified(CODILATED), 12)
    for n in range(1, 12):
        assert r_from_p(P[n], n).allclose(Poly(np.ones(n + 1)), rtol=1e-10)


def test_r_of_constant():
    assert r_from_p(Poly([1.0]), 0).allclose(Poly([1.0]))


def test_phi_for_half_start_family():
    for n in range(1, 16):
        ref = Poly([0] * (n - 1) + [1])
        assert phi_from_family(builtin("lambda2half"), n).allclose(ref, rtol=1e-9)


def test_phi_for_codilated_family():
    fam = builtin("lambda2half").modified(CODILATED)
    for n in range(1, 16):
        ref = Poly(np.arange(1, n + 1) / n)
        assert phi_from_family(fam, n).allclose(ref, rtol=1e-9)


@pytest.mark.parametrize("name", ["example1", "crr", "crr_tabulated", "lambda2half"])
def test_phi_two_routes_agree(name):
    fam = builtin(name)
    phis = szego(VerblunskyData.from_family(fam, 15).alpha, 15)
    for n in range(1, 16):
        assert phi_from_family(fam, n).allclose(phis[n - 1], rtol=1e-8)


def test_phi_with_wrong_parameters_fails():
    fam = builtin("crr")
    c, l = family_inputs(fam, 8)
    wrong = ParamSeq(np.clip(l.values + 0.05, 0, 0.99), "general")
    with pytest.raises(IdentityViolationError):
        phi_from_p(generate_first(fam, 8), wrong, c, 6)


# ------------------------------------------------------ para-orthogonal

def test_paraorthogonal_of_monomial():
    rho = paraorthogonal(Poly([0, 0, 0, 1]), 1.0)
    assert rho.allclose(Poly([-1, 0, 0, 0, 1]))


@pytest.mark.parametrize("name", ["example1", "crr", "lambda2half"])
@pytest.mark.parametrize("tau", [1.0, np.exp(0.7j), -1.0])
def test_paraorthogonal_roots_unimodular(name, tau):
    phis = szego(VerblunskyData.from_family(builtin(name), 20).alpha, 20)
    for n in (1, 5, 12, 20):
        roots = all_roots(paraorthogonal(phis[n - 1], tau, n)).complex_roots
        assert np.max(np.abs(np.abs(roots) - 1)) <= 1e-8


def test_paraorthogonal_relates_to_r_for_half_start_family():
    # phi = z^{n-1}, tau = -1 gives z^n + 1 = r_n
    n = 7
    rho = paraorthogonal(Poly([0] * (n - 1) + [1]), -1.0)
    P = generate_first(builtin("lambda2half"), n)
    assert rho.allclose(r_from_p(P[n], n), rtol=1e-10)


def test_paraorthogonal_needs_unimodular_tau():
    with pytest.raises(InvalidVerblunskyError):
        paraorthogonal(Poly([1.0]), 0.9)
