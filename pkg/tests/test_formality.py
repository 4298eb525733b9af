from fractions import Fraction

from hochform.polyalg import parse_poly
from hochform.hochschild import Cochain
from hochform.cooperadic import a_letter, d_letter, sort_factors
from hochform.formality import (XiBudget, xi_basis, xi_d, xi_d_sum, xi_cobracket,
                                filtration_degree, monomial_weight, sigma_m_value,
                                verify_sigma_chain_map, letter_cochain,
                                obstruction_solve, harrison_window, window_basis,
                                window_d)

F1 = Fraction(1)

X = a_letter((1,))
XX = a_letter((2,))
D = d_letter((0,), 0)
XD = d_letter((1,), 0)


def K(*words):
    key, sgn = sort_factors(list(words))
    assert sgn == 1
    return key


def test_xi_basis_minimal_budget():
    basis = xi_basis(1, XiBudget(1, 1, 0))
    assert basis == [((D,),)]


def test_xi_basis_small_budget():
    basis = xi_basis(1, XiBudget(1, 2, 1))
    words = {w for (w,) in basis}
    assert (X,) in words and (D,) in words and (XD,) in words
    assert (X, X) in words and (X, D) in words and (X, XD) in words
    assert len(basis) == 6


def test_xi_basis_respects_weight_cap():
    basis = xi_basis(1, XiBudget(2, 2, 2, max_weight=1))
    assert all(monomial_weight(k) <= 1 for k in basis)
    assert (((X,), (X,), )) not in basis or monomial_weight(((X,), (X,))) <= 1


def test_xi_d_single_letter_vanishes():
    assert xi_d(((X,),), 1) == {}
    assert xi_d(((D,),), 1) == {}


def test_xi_d_two_factor_action():
    # <f>.<v> maps to the action word, pure pairing part
    key = K((XX,), (D,))
    got = xi_d(key, 1)
    assert list(got) == [((X,),)]
    assert abs(got[((X,),)]) == 2


def test_xi_d_two_letter_word_merge():
    # <f,g> maps to the product word, pure bar part
    key = ((X, XX),)
    got = xi_d(key, 1)
    assert got == {((a_letter((3,)),),): F1}


def test_xi_d_squares_to_zero_small():
    n = 1
    for key in xi_basis(n, XiBudget(3, 3, 2, max_weight=2)):
        dd = xi_d_sum(xi_d(key, n), n)
        assert dd == {}, key


def test_xi_d_squares_to_zero_two_vars():
    n = 2
    for key in xi_basis(n, XiBudget(3, 3, 2, max_weight=2)):
        dd = xi_d_sum(xi_d(key, n), n)
        assert dd == {}, key


def test_xi_d_filtration_drops_by_one():
    n = 2
    for key in xi_basis(n, XiBudget(3, 3, 2, max_weight=2)):
        f = filtration_degree(key)
        for k2 in xi_d(key, n):
            assert filtration_degree(k2) == f - 1, key


def test_xi_cobracket_filtration_drops_by_one():
    n = 2
    for key in xi_basis(n, XiBudget(2, 3, 1, max_weight=2)):
        f = filtration_degree(key)
        for (k1, k2) in xi_cobracket(key, n):
            assert filtration_degree(k1) + filtration_degree(k2) == f - 1, key


def test_sigma_value_bracket_case():
    # <f>.<v> in canonical order: sign (-1)^(degree of the first factor) = +1
    # on [f, v] = -v(f)
    key = K((XX,), (D,))
    assert key == ((XX,), (D,))
    got = sigma_m_value(key, 1)
    assert got == Cochain.from_poly(parse_poly("-2*x1", 1))


def test_sigma_value_cup_case():
    key = ((X, D),)
    got = sigma_m_value(key, 1)
    # cup of a monomial and a derivation letter is the rescaled derivation
    assert got == letter_cochain(XD, 1)


def test_sigma_value_vanishes_beyond_two_letters():
    assert sigma_m_value(((X, X, D),), 1).is_zero()
    assert sigma_m_value(K((X,), (X,), (D,)), 1).is_zero()
    assert sigma_m_value(K((X, X), (D,)), 1).is_zero()


def test_sigma_chain_map_small():
    rep = verify_sigma_chain_map(1, XiBudget(2, 2, 1))
    assert rep["failures"] == []


def test_sigma_chain_map_two_vars():
    rep = verify_sigma_chain_map(2, XiBudget(2, 2, 1, max_weight=2))
    assert rep["failures"] == []


def test_obstruction_vff():
    rep = obstruction_solve("vff")
    assert rep["unique_zero"] and rep["rank"] == 2
    assert rep["solution"] == [0, 0]


def test_obstruction_vfv():
    rep = obstruction_solve("vfv")
    assert rep["unique_zero"] and rep["rank"] == 2


def test_obstruction_degenerate_data_flagged():
    # constant coefficient fields commute, so the second system loses rank
    rep = obstruction_solve("vfv", nvars=2, seed=3, instances=4, der_coef_deg=0)
    assert rep["kernel_dim"] > 0 and not rep["unique_zero"]


def test_window_d_squares_to_zero():
    n = 1
    for w in (2, 3, 4):
        basis = window_basis(n, w, 4)
        for d, monos in basis.items():
            for m in monos:
                dd = {}
                for k2, c in window_d(m, n).items():
                    for k3, c2 in window_d(k2, n).items():
                        dd[k3] = dd.get(k3, 0) + c * c2
                assert all(v == 0 for v in dd.values()), m


def test_harrison_window_one_var():
    table = harrison_window(1, 3, 4)
    for w in (1, 2, 3):
        entry = table[w]
        assert entry["complete"] and entry["ok"], (w, entry)
        assert entry["dims"].get(0, 0) == 1
        assert all(v == 0 for d, v in entry["dims"].items() if d != 0)


def test_harrison_window_two_vars():
    table = harrison_window(2, 2, 3)
    assert table[1]["dims"].get(0) == 2
    assert table[2]["dims"].get(0) == 3
    assert table[2]["ok"]


def test_harrison_window_incomplete_flagged():
    table = harrison_window(1, 4, 2)
    assert not table[4]["complete"]
