from fractions import Fraction

import numpy as np
import pytest

from weldgff import virasoro as V
from weldgff.virasoro import (
    ALPHA,
    ALPHABAR,
    GAMMA,
    I,
    ONE,
    QSYM,
    SQRT2,
    Coeff,
    ModePoly,
    adjoint_residual,
    basis_state_gram,
    central_charge,
    d_alpha_apply,
    delta_alpha,
    ff_apply,
    gram_commutator,
    gram_wick,
    heisenberg_apply,
    inner_product,
    kac_membership,
    partitions_of,
    stress_mode_poly,
    wick_expectation,
    witt_apply,
    witt_ff_coincidence_defect,
)

HALF_I = I * SQRT2 * Fraction(1, 2)  # i/sqrt2


def test_coeff_ring_basics():
    assert (I * I) == Coeff.rat(-1)
    assert (SQRT2 * SQRT2) == Coeff.rat(2)
    assert (GAMMA * V.GAMMA_INV) == ONE
    assert I.conjugate() == Coeff.rat(-1) * I
    assert ALPHA.conjugate() == ALPHABAR
    # Q substitution: c_L = 1 + 6 Q^2 evaluated on gamma
    cl = central_charge().substitute_Q()
    assert abs(cl.evaluate(2.0) - 25.0) < 1e-12
    assert abs(central_charge().evaluate(np.sqrt(2)) - 28.0) < 1e-12


def test_heisenberg_basics():
    one = ModePoly.one()
    # A_1 phi_1 = i/sqrt2
    out = heisenberg_apply(1, ModePoly.phi(1))
    assert out == ModePoly.one().scale(HALF_I)
    # [A_1, A_{-1}] 1 = 1
    comm = (heisenberg_apply(1, heisenberg_apply(-1, one))
            - heisenberg_apply(-1, heisenberg_apply(1, one)))
    assert comm == one
    # A_{0,alpha} 1 = (i/sqrt2)(Q - alpha)
    assert heisenberg_apply(0, one) == one.scale(HALF_I * (QSYM - ALPHA))


@pytest.mark.parametrize("n,m", [(1, -1), (2, -2), (2, 1), (-3, 1)])
def test_heisenberg_commutators(n, m):
    p = ModePoly.phi(1) * ModePoly.phi(2) + ModePoly.one().scale(QSYM)
    comm = (heisenberg_apply(n, heisenberg_apply(m, p))
            - heisenberg_apply(m, heisenberg_apply(n, p)))
    expect = p.scale(Fraction(n)) if n == -m else ModePoly()
    assert comm == expect


def test_ff_highest_weight():
    one = ModePoly.one()
    for n in range(1, 5):
        assert ff_apply(n, one).is_zero()
    assert ff_apply(0, one) == one.scale(delta_alpha())


def test_ff_level_one_state():
    # hand expansion: L_{-1} 1 = -alpha phi_1
    out = ff_apply(-1, ModePoly.one())
    assert out == ModePoly.phi(1).scale(Coeff.rat(-1) * ALPHA)


def test_virasoro_central_term():
    # [L_2, L_{-2}] 1 = (4 Delta + c_L/2) 1
    one = ModePoly.one()
    comm = ff_apply(2, ff_apply(-2, one)) - ff_apply(-2, ff_apply(2, one))
    expect = one.scale(delta_alpha() * Fraction(4) + central_charge() * Fraction(1, 2))
    assert comm == expect


@pytest.mark.parametrize("n,m", [(1, -1), (2, -2), (1, 2), (-1, -2), (3, -1)])
def test_virasoro_relations_sample(n, m):
    states = [ModePoly.one(), ModePoly.phi(1), ModePoly.phi(2),
              ModePoly.phi(1) * ModePoly.phi(1)]
    cl = central_charge()
    for p in states:
        comm = ff_apply(n, ff_apply(m, p)) - ff_apply(m, ff_apply(n, p))
        expect = ff_apply(n + m, p).scale(Fraction(n - m))
        if n == -m:
            expect = expect + p.scale(cl * Fraction(n**3 - n, 12))
        assert (comm - expect).is_zero()


def test_witt_formula_readoffs():
    # D_0 phi_m = m phi_m; D_1 phi_1 = Q; D_1 c-column: D_1(c) = 0
    assert witt_apply(0, ModePoly.phi(3)) == ModePoly.phi(3).scale(3)
    assert witt_apply(1, ModePoly.phi(1)) == ModePoly.one().scale(QSYM)
    comm = (witt_apply(1, witt_apply(-1, ModePoly.phi(1)))
            - witt_apply(-1, witt_apply(1, ModePoly.phi(1))))
    assert comm == ModePoly.phi(1).scale(2)


@pytest.mark.parametrize("n,m", [(1, -1), (2, -2), (2, -1), (-2, 3), (4, -3)])
def test_witt_relations_sample(n, m):
    states = [ModePoly.one(), ModePoly.phi(1), ModePoly.phibar(2),
              ModePoly.monomial(c_exp=1), ModePoly.phi(1) * ModePoly.phibar(1),
              ModePoly.monomial(c_exp=1, phis=((2, 1),))]
    for p in states:
        comm = witt_apply(n, witt_apply(m, p)) - witt_apply(m, witt_apply(n, p))
        expect = witt_apply(n + m, p).scale(Fraction(n - m))
        assert (comm - expect).is_zero()


def test_d_alpha_readoffs():
    # multiplier sign follows the zero-mode substitution that makes the
    # adjoint relation exact (the opposite sign shifts it by 2nQ phi_n)
    one = ModePoly.one()
    assert d_alpha_apply(1, one) == ModePoly.phibar(1).scale(
        Coeff.rat(-1) * ALPHA * Fraction(1, 2))
    assert d_alpha_apply(-1, one) == ModePoly.phi(1).scale(ALPHA * Fraction(1, 2))


def test_d_alpha_witt_closure():
    p = ModePoly.phi(2)
    comm = (d_alpha_apply(1, d_alpha_apply(-1, p))
            - d_alpha_apply(-1, d_alpha_apply(1, p)))
    assert comm == witt_apply(0, p).scale(2)


def test_wick_expectations():
    assert wick_expectation(ModePoly.one()) == ONE
    p = ModePoly.phi(3) * ModePoly.phibar(3)
    assert wick_expectation(p) == Coeff.rat(1, 3)
    assert wick_expectation(p, "half_log") == Coeff.rat(1, 6)
    q = ModePoly.phi(2, 2) * ModePoly.phibar(2, 2)
    assert wick_expectation(q) == Coeff.rat(1, 2)  # E|phi_2|^4 = 2 (1/2)^2
    # unmatched powers vanish
    assert wick_expectation(ModePoly.phi(1)).is_zero()


def test_heisenberg_adjoint():
    # <A_n F, G> = <F, A_{-n} G> exactly on the half-variance background
    F = ModePoly.phi(1) * ModePoly.phi(2)
    G = ModePoly.phi(1) * ModePoly.phi(2) + ModePoly.phi(3).scale(I)
    for n in (1, 2, 3, -1, -2):
        lhs = inner_product(heisenberg_apply(n, F), G, "half_log")
        rhs = inner_product(F, heisenberg_apply(-n, G), "half_log")
        assert (lhs - rhs).is_zero()


def test_stress_mode_poly():
    assert stress_mode_poly(0).is_zero()
    assert stress_mode_poly(1).is_zero()
    p2 = stress_mode_poly(2)
    expect = (ModePoly.phi(1, 2)
              - ModePoly.phi(2).scale(QSYM * Fraction(2)))
    assert p2 == expect


def test_stress_mode_poly_vs_numeric_pairing():
    # exact polynomial evaluated on a random numeric field vs the contour
    # pairing of the stress tensor with the Laurent vector field
    from weldgff import fields as F
    from weldgff.quadrature import VectorFieldSeries, pair_q_vector

    rng = np.random.default_rng(3)
    gamma = 1.3
    Qn = gamma / 2 + 2 / gamma
    fld = F.sample_field(F.NEUMANN_DOT, 6, seed=77)
    for n in (2, 3, 4):
        poly = stress_mode_poly(n)
        val = 0j
        for (c, p_exp, b_exp), coeff in poly.terms.items():
            term = coeff.evaluate(gamma)
            for m, e in p_exp:
                term *= fld.modes[m - 1] ** e
            for m, e in b_exp:
                term *= np.conj(fld.modes[m - 1]) ** e
            val += term

        def Tq(z):
            T, _ = F.stress_tensors(fld, z, Qn, "interior")
            return T

        ref, _ = pair_q_vector(Tq, VectorFieldSeries.basis(-n), radius=0.7)
        assert abs(val - ref) < 1e-10


def test_adjoint_residual_exact_zero():
    F1 = ModePoly.one()
    assert adjoint_residual(1, F1, F1).is_zero()
    assert adjoint_residual(1, ModePoly.phi(1), ModePoly.phi(1)).is_zero()
    assert adjoint_residual(2, ModePoly.phi(2), ModePoly.phi(1, 2)).is_zero()
    mixed = ModePoly.phi(1) * ModePoly.phibar(2)
    assert adjoint_residual(2, mixed, ModePoly.phibar(1) * mixed).is_zero()


def test_gram_trivial_and_level_one():
    assert gram_commutator(ALPHA, {}, {}) == ONE
    b = gram_commutator(ALPHA, {1: 1}, {1: 1})
    assert b == delta_alpha() * Fraction(2)
    assert (gram_wick(ALPHA, {1: 1}, {1: 1}) - b).is_zero()


@pytest.mark.parametrize("lk,lk2", [(2, 2), (3, 3), (2, 0), (1, 3)])
def test_gram_consistency_low_levels(lk, lk2):
    for k in partitions_of(lk):
        for k2 in partitions_of(lk2):
            bc = gram_commutator(ALPHA, k, k2)
            bw = gram_wick(ALPHA, k, k2)
            assert (bc - bw).is_zero()


def test_level2_kac_determinant():
    # Gram matrix of {L_{-1}^2 1, L_{-2} 1}: det vanishes exactly on the
    # level <= 2 degeneracy values of alpha and nowhere generic
    parts = partitions_of(2)
    M = [[gram_commutator(ALPHA, a, b) for b in parts] for a in parts]
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    # alpha = 0 (r = s = 1 root)
    assert det.substitute_alpha(Coeff.rat(0)).substitute_Q().is_zero()
    # alpha = -gamma/2 <-> (r, s) = (2, 1)
    root21 = GAMMA * Fraction(-1, 2)
    assert det.substitute_alpha(root21).substitute_Q().is_zero()
    # alpha = -2/gamma <-> (r, s) = (1, 2)
    root12 = V.GAMMA_INV * Fraction(-2)
    assert det.substitute_alpha(root12).substitute_Q().is_zero()
    # generic alpha: nonzero numerically
    val = det.substitute_alpha(Coeff.rat(1, 3)).substitute_Q().evaluate(1.3)
    assert abs(val) > 1e-6


def test_kac_membership():
    gamma = np.sqrt(2.0)
    name, wit = kac_membership(0.0, gamma)
    assert name == "in_minus" and wit == (1, 1)
    name, wit = kac_membership(gamma + 4 / gamma, gamma)
    assert name == "in_plus" and wit == (1, 1)
    Q = gamma / 2 + 2 / gamma
    assert kac_membership(Q + 0.1j, gamma)[0] == "outside"


def test_witt_ff_coincidence():
    for n in (1, 2, 3):
        for p in [ModePoly.one(), ModePoly.phi(1), ModePoly.phi(2),
                  ModePoly.phi(1, 2), ModePoly.phi(1) * ModePoly.phi(2)]:
            defect = witt_ff_coincidence_defect(n, p)
            assert defect.is_zero(), f"n={n}, p={p}, defect={defect}"


def test_basis_state_gram_wrapper():
    state, gram = basis_state_gram(ALPHA, {1: 1}, {1: 1})
    assert state == ModePoly.phi(1).scale(Coeff.rat(-1) * ALPHA)
    assert gram == delta_alpha() * Fraction(2)
