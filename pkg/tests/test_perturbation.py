import json
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import binomial_closed_form
from r2spectra.errors import DegenerateGridError
from r2spectra.perturbation import (
    PerturbationSpec,
    TransferMatrix2,
    casoratti,
    casoratti_perturbed,
    kappa,
    lam_q_product,
    n_k_matrix,
    perturb_direct,
    perturb_via_nk,
    perturb_via_sk,
    relate_two_perturbations,
    s_hat_k,
    s_k,
    transfer_T,
    transfer_T_pert,
)
from r2spectra.poly import Poly, coeff_distance, rel_coeff_error
from r2spectra.recurrence import builtin, generate_associated, generate_first, generate_second

FAMILIES = ["example1", "lambda2half", "crr", "crr_tabulated", "chebyshev_r2"]


def max_rel(a, b, lo=0):
    return max(rel_coeff_error(a[n], b[n]) for n in range(lo, len(b)))


def half_power(n, sign):
    """((x - i)/2)^n for sign = -1, ((x + i)/2)^n for sign = +1."""
    unit = 1j * sign
    return Poly([comb(n, j) * unit ** (n - j) / 2 ** n for j in range(n + 1)])


# ------------------------------------------------------------------ spec

def test_spec_validation():
    with pytest.raises(ValueError):
        PerturbationSpec(((2, 0.0, 0.0),))
    with pytest.raises(ValueError):
        PerturbationSpec(((3, 0.1, 1.0), (3, 0.2, 1.0)))
    with pytest.raises(ValueError):
        PerturbationSpec(((-1, 0.1, 1.0),))


def test_spec_json_round_trip(tmp_path):
    spec = PerturbationSpec(((2, 0.5, 1.0), (4, -0.7, 0.3)))
    path = tmp_path / "p.json"
    path.write_text(json.dumps(spec.to_dict()))
    assert PerturbationSpec.load(path) == spec


def test_steps_follow_family_convention():
    spec = PerturbationSpec.single(2, 0.1, 0.5)
    assert spec.steps(builtin("example1")) == {2: (0.1, 0.5)}
    assert spec.steps(builtin("lambda2half")) == {1: (0.1, 0.5)}


# ---------------------------------------------------------------- direct

def test_example1_corecursive_at_level_zero_closed_form():
    P, _ = perturb_direct(builtin("example1"), PerturbationSpec.single(0, 1.0, 1.0), 15)
    U = generate_first(builtin("example1"), 15)
    for n in range(0, 14):
        m = n + 1
        # P_{n+1}(x;1) = P_{n+1} - P_n = (i/2)(x-2-i)((x-i)/2)^{n+1} - (i/2)(x-2+i)((x+i)/2)^{n+1}
        ref = 0.5j * Poly([-2 - 1j, 1]) * half_power(m, -1) - 0.5j * Poly([-2 + 1j, 1]) * half_power(m, 1)
        assert rel_coeff_error(P[m], ref) <= 1e-13
        assert rel_coeff_error(P[m], U[m] - U[n]) <= 1e-13


def test_example1_closed_form_without_half_factor_does_not_match():
    P, _ = perturb_direct(builtin("example1"), PerturbationSpec.single(0, 1.0, 1.0), 6)
    printed = 1j * Poly([-2 - 1j, 1]) * half_power(5, -1) - 1j * Poly([-2 + 1j, 1]) * half_power(5, 1)
    assert rel_coeff_error(P[5], printed) > 0.1


def test_first_perturbed_polynomial_is_x_minus_one():
    P, _ = perturb_direct(builtin("example1"), PerturbationSpec.single(0, 1.0, 1.0), 3)
    assert P[1].allclose(Poly([-1.0, 1.0]))


@pytest.mark.parametrize("name", FAMILIES)
def test_identity_perturbation_is_unperturbed(name):
    fam = builtin(name)
    P, Q = perturb_direct(fam, PerturbationSpec.single(3, 0.0, 1.0), 10)
    U, V = generate_first(fam, 10), generate_second(fam, 10)
    assert all(P[n].allclose(U[n], rtol=0) for n in range(11))
    assert all(Q[n].allclose(V[n], rtol=0) for n in range(1, 11))


def test_codilation_of_lambda2half_gives_example1_shape():
    P, _ = perturb_direct(builtin("lambda2half"), PerturbationSpec.single(2, 0.0, 0.5), 20)
    for n in range(0, 21):
        assert np.max(np.abs(P[n].padded(n + 2) - binomial_closed_form(n + 1, 1j))) <= 1e-12


def test_level_at_or_above_degree_is_rejected():
    with pytest.raises(ValueError):
        perturb_direct(builtin("example1"), PerturbationSpec.single(5, 1.0, 1.0), 5)


@pytest.mark.parametrize("name", FAMILIES)
def test_prefix_is_unchanged(name):
    fam = builtin(name)
    k = 4
    P, _ = perturb_direct(fam, PerturbationSpec.single(k, 0.9, 1.7), 10)
    U = generate_first(fam, 10)
    assert all(P[n].allclose(U[n], rtol=0) for n in range(fam.level_to_step(k) + 1))


# ---------------------------------------------------------------- S_k

def test_s_k_zero_for_identity():
    assert s_k(builtin("crr"), 3, 0.0, 1.0).is_zero()


def test_s_0_of_example1_is_constant_mu():
    assert s_k(builtin("example1"), 0, 0.37, 1.0).allclose(Poly([0.37]))
    assert s_k(builtin("example1"), 0, 0.37, 2.0).allclose(Poly([0.37]))


@pytest.mark.parametrize("mu,nu,deg", [(0.4, 1.2, 4), (0.4, 1.0, 3), (0.0, 1.2, 4)])
def test_s_k_degree(mu, nu, deg):
    # deg S_k is k when nu = 1 and k + 1 otherwise
    assert s_k(builtin("crr_tabulated"), 3, mu, nu).degree == deg


def test_s_hat_k_definition():
    fam = builtin("example1")
    Q = generate_second(fam, 5)
    ref = -0.3 * Q[3] - (0.5 - 1) * 0.25 * Poly([1, 0, 1]) * Q[2]
    assert s_hat_k(fam, 3, 0.3, 0.5).allclose(ref)
    assert s_hat_k(fam, 0, 0.3, 0.5).is_zero()


def test_structural_route_example1_level4():
    fam = builtin("example1")
    P, _ = perturb_direct(fam, PerturbationSpec.single(4, -0.7, 1.0), 9)
    S = perturb_via_sk(fam, 4, -0.7, 1.0, 9)
    assert max_rel(S, P) <= 1e-9


def test_structural_route_at_level_zero_is_difference_form():
    fam = builtin("example1")
    S = perturb_via_sk(fam, 0, 1.0, 1.0, 10)
    U = generate_first(fam, 10)
    assert all(rel_coeff_error(S[n + 1], U[n + 1] - U[n]) <= 1e-14 for n in range(10))


@given(st.sampled_from(FAMILIES), st.integers(1, 8), st.floats(-2, 2), st.floats(0.2, 3.0))
def test_structural_route_equals_direct(name, k, mu, nu):
    fam = builtin(name)
    if fam.start_offset > k:
        k = fam.start_offset
    P, _ = perturb_direct(fam, PerturbationSpec.single(k, mu, nu), 14)
    assert max_rel(perturb_via_sk(fam, k, mu, nu, 14), P) <= 1e-8


# -------------------------------------------------------------- Casoratti

def test_casoratti_of_identical_sequences_vanishes():
    P = generate_first(builtin("crr"), 8)
    assert casoratti(P[5], P[6], P[5], P[6]).is_zero() or casoratti(P[5], P[6], P[5], P[6]).norm() < 1e-15


@pytest.mark.parametrize("n,k", [(5, 2), (8, 3), (9, 5)])
@pytest.mark.parametrize("name", ["example1", "crr_tabulated"])
def test_casoratti_with_associated(name, n, k):
    # D(P_n, P^{(k)}_{n-k}) = prod_{j=k..n} lambda_j (x^2+1) P_{k-1}: n-k+1 factors of x^2+1
    fam = builtin(name)
    P, A = generate_first(fam, n + 1), generate_associated(fam, k, n - k + 1)
    D = casoratti(P[n], P[n + 1], A[n - k], A[n - k + 1])
    ref = lam_q_product(fam, k, n) * P[k - 1]
    assert D.degree == 2 * n - k + 1
    assert rel_coeff_error(D, ref) <= 1e-12


@pytest.mark.parametrize("name", ["example1", "crr", "crr_tabulated"])
@pytest.mark.parametrize("n", [1, 4, 9])
def test_casoratti_first_and_second_kind(name, n):
    fam = builtin(name)
    P, Q = generate_first(fam, n + 1), generate_second(fam, n + 1)
    prod = lam_q_product(fam, 1, n)
    # rows (n, n+1) give -prod; the matrix [[P_{n+1}, -Q_{n+1}], [P_n, -Q_n]] has det +prod
    # the products have coefficients near P.norm() * Q.norm(); the determinant is far smaller
    tol = 1e-14 * max(1.0, P[n + 1].norm() * Q[n + 1].norm())
    assert coeff_distance(casoratti(P[n], P[n + 1], -1 * Q[n], -1 * Q[n + 1]), -1 * prod) <= tol
    F = TransferMatrix2(P[n + 1], -1 * Q[n + 1], P[n], -1 * Q[n])
    assert coeff_distance(F.det(), prod) <= tol


@pytest.mark.parametrize("name,k", [("example1", 0), ("example1", 4), ("example1", 3), ("crr_tabulated", 3),
                                    ("crr", 2)])
@pytest.mark.parametrize("mu", [-0.7, 0.43])
def test_casoratti_perturbed_identity(name, k, mu):
    rep = casoratti_perturbed(builtin(name), k, mu, 12)
    assert rep.ok, rep.max_rel_residual


def test_casoratti_perturbed_zero_shift():
    rep = casoratti_perturbed(builtin("example1"), 3, 0.0, 8)
    assert all(p.norm() < 1e-14 for p in rep.lhs) and all(p.norm() == 0 for p in rep.rhs)


# ------------------------------------------------------- transfer matrices

@pytest.mark.parametrize("name", FAMILIES)
def test_transfer_matrix_determinant(name):
    fam = builtin(name)
    for n in range(1, 8):
        T = transfer_T(fam, n + fam.start_offset)
        ref = fam.lam_step(n) * fam.q_step(n)
        assert rel_coeff_error(T.det(), ref) <= 1e-14


def test_unperturbed_transfer_is_plain_transfer():
    fam = builtin("crr")
    a, b = transfer_T_pert(fam, 3, 0.0, 1.0), transfer_T(fam, 3)
    assert all(p.allclose(q, rtol=0) for p, q in zip(a.entries(), b.entries()))


@pytest.mark.parametrize("name", FAMILIES)
def test_transfer_product_reproduces_sequence(name):
    fam = builtin(name)
    P = generate_first(fam, 10)
    M = TransferMatrix2.identity()
    for s in range(0, 10):
        M = transfer_T(fam, s + fam.start_offset) @ M
        top, bottom = M.apply((Poly([1.0]), Poly()))
        assert rel_coeff_error(top, P[s + 1]) <= 1e-13 and rel_coeff_error(bottom, P[s]) <= 1e-13


def test_kappa_at_first_level_is_one():
    assert kappa(builtin("example1"), 0).allclose(Poly([1.0]))


# ------------------------------------------------------------------- N_k

def test_n_k_identity_perturbation_is_scaled_identity():
    fam = builtin("crr_tabulated")
    N = n_k_matrix(fam, 4, 0.0, 1.0)
    K = kappa(fam, 4)
    assert rel_coeff_error(N.p11, K) < 1e-14 and rel_coeff_error(N.p22, K) < 1e-14
    assert N.p12.norm() == 0 and N.p21.norm() == 0


@pytest.mark.parametrize("name,k,mu,nu", [("example1", 3, 0.4, 0.7), ("crr_tabulated", 5, -1.1, 1.6),
                                          ("chebyshev_r2", 2, 0.3, 2.0)])
def test_n_k_determinant(name, k, mu, nu):
    fam = builtin(name)
    N = n_k_matrix(fam, k, mu, nu)
    s = fam.level_to_step(k)
    P, Q = generate_first(fam, s), generate_second(fam, max(s, 1))
    K = kappa(fam, k)
    ref = K * (K + s_k(fam, k, mu, nu) * Q[s] + s_hat_k(fam, k, mu, nu) * P[s])
    assert rel_coeff_error(N.det(), ref) <= 1e-10


def test_n_k_for_codilated_lambda2half():
    # computed independently from the entry formulas: K = (x^2+1)/2, S = -(x^2+1)/4,
    # S^ = 0, P_1 = x, Q_1 = 1
    N = n_k_matrix(builtin("lambda2half"), 2, 0.0, 0.5)
    x2p1 = Poly([1.0, 0.0, 1.0])
    assert rel_coeff_error(N.p11, 0.25 * x2p1) <= 1e-15
    assert rel_coeff_error(N.p12, -0.25 * Poly([0.0, 1.0]) * x2p1) <= 1e-15
    assert N.p21.norm() == 0
    assert rel_coeff_error(N.p22, 0.5 * x2p1) <= 1e-15


def test_nk_route_for_codilated_lambda2half():
    fam = builtin("lambda2half")
    P, Q = perturb_via_nk(fam, PerturbationSpec.single(2, 0.0, 0.5), 20)
    V = generate_second(fam, 20)
    for n in range(0, 21):
        assert np.max(np.abs(P[n].padded(n + 2) - binomial_closed_form(n + 1, 1j))) <= 1e-12
    assert all(rel_coeff_error(Q[n], V[n]) <= 1e-14 for n in range(1, 21))


@given(st.sampled_from(FAMILIES), st.integers(0, 10), st.floats(-2, 2), st.floats(0.2, 3.0))
def test_nk_route_equals_direct(name, k, mu, nu):
    fam = builtin(name)
    k = max(k, fam.start_offset)
    spec = PerturbationSpec.single(k, mu, nu)
    P, Q = perturb_direct(fam, spec, 20)
    Pn, Qn = perturb_via_nk(fam, spec, 20)
    assert max_rel(Pn, P) <= 1e-8
    assert max_rel(Qn, Q, lo=1) <= 1e-8


@given(st.sampled_from(FAMILIES), st.lists(st.tuples(st.floats(-1.5, 1.5), st.floats(0.3, 2.5)),
                                            min_size=2, max_size=3),
       st.integers(1, 3))
def test_composed_perturbations_equal_direct(name, pairs, start):
    fam = builtin(name)
    lvl = max(start, fam.start_offset)
    spec = PerturbationSpec(tuple((lvl + 2 * i, mu, nu) for i, (mu, nu) in enumerate(pairs)))
    P, Q = perturb_direct(fam, spec, 16)
    Pn, Qn = perturb_via_nk(fam, spec, 16)
    assert max_rel(Pn, P) <= 1e-8
    assert max_rel(Qn, Q, lo=1) <= 1e-8


def test_float_nk_route_loses_accuracy_on_crr_near_level_ten():
    # N_k [P; -Q] cancels ~10 orders of magnitude here; doubles cannot carry it
    fam = builtin("crr_tabulated")
    spec = PerturbationSpec.single(10, 1.3, 0.4)
    P, _ = perturb_direct(fam, spec, 20)
    exact, _ = perturb_via_nk(fam, spec, 20)
    assert max_rel(exact, P) <= 1e-12
    try:
        floated, _ = perturb_via_nk(fam, spec, 20, arithmetic="float")
    except Exception:
        return  # the remainder certificate refused the division
    assert max_rel(floated, P) > 1e-8


def test_unknown_arithmetic_mode():
    with pytest.raises(ValueError):
        perturb_via_nk(builtin("example1"), PerturbationSpec.single(2, 0.1, 1.0), 5, arithmetic="quad")


@pytest.mark.parametrize("name,k,m", [("example1", 4, 2), ("crr_tabulated", 3, 1), ("crr", 5, 2)])
def test_relation_between_two_perturbations(name, k, m):
    rep = relate_two_perturbations(builtin(name), k, m, ((0.6, 1.3), (-0.4, 0.8)), 12)
    assert rep.ok, rep.max_rel_residual
    assert rep.nodes_used > 0


def test_relation_with_equal_parameters():
    rep = relate_two_perturbations(builtin("example1"), 5, 2, ((0.5, 1.0), (0.5, 1.0)), 12)
    assert rep.ok


def test_relation_rejects_wrong_order():
    with pytest.raises(ValueError):
        relate_two_perturbations(builtin("example1"), 2, 4, ((0.1, 1.0), (0.1, 1.0)), 10)


def test_relation_degenerate_grid():
    # the unperturbed family at m = k-level 1 with nu = 0+ ... use a grid at the zeros of K
    fam = builtin("example1")
    with pytest.raises(DegenerateGridError):
        relate_two_perturbations(fam, 3, 1, ((0.2, 1.0), (0.2, 1.0)), 8, grid=np.array([1j, -1j]))
