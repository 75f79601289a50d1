from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyforge import sphere as S
from polyforge.sphere import SIGMA, SIGMA_INV, TAU, TAU_INV


def test_generators_are_rotations():
    assert S.rho() == tuple(tuple(Fraction(v, 5) for v in row) for row in ((3, 4, 0), (-4, 3, 0), (0, 0, 5)))
    assert S.phi() == tuple(tuple(Fraction(v, 5) for v in row) for row in ((5, 0, 0), (0, 3, 4), (0, -4, 3)))
    assert S.is_rotation(S.rho()) and S.is_rotation(S.phi())
    assert S.word_to_matrix((TAU, TAU_INV)) == S.IDENTITY


def test_exact_orthogonality_up_to_length_8():
    for w in S.words_up_to(8):
        m = S.word_int_matrix(w)
        scale = 25 ** len(w)
        assert S.matmul(m, S.transpose(m)) == tuple(
            tuple(scale if i == j else 0 for j in range(3)) for i in range(3))
        assert S.det3(m) == 125 ** len(w)


def test_word_census():
    assert sum(1 for _ in S.reduced_words(3)) == 36
    assert sum(1 for _ in S.words_up_to(3)) == 53


def test_enum_word_covers_short_words():
    seen = {S.enum_word(n) for n in range(341)}
    assert set(S.words_up_to(4)) <= seen
    assert S.enum_word(0) == ()
    assert S.enum_word(1) == (TAU,)


@given(st.lists(st.integers(0, 3), max_size=12), st.lists(st.integers(0, 3), max_size=12))
def test_word_matrix_is_a_homomorphism(u, v):
    u, v = S.reduce_word(u), S.reduce_word(v)
    assert S.word_to_matrix(S.word_mul(u, v)) == S.matmul(S.word_to_matrix(u), S.word_to_matrix(v))
    assert S.word_mul(u, S.word_inverse(u)) == ()


def test_freeness_small_and_full():
    small = S.freeness_check(3)
    assert small["checked"] == 4 + 12 + 36
    full = S.freeness_check(8)
    assert full["checked_at_max_len"] == 8748
    assert full["collisions"] == []
    assert full["agree"]


def test_classify_pieces():
    assert S.classify_piece(()) == 3
    assert S.classify_piece((SIGMA_INV, SIGMA_INV)) == 3
    assert S.classify_piece((TAU, SIGMA)) == 1
    assert S.classify_piece((TAU_INV, SIGMA)) == 2
    assert S.classify_piece((SIGMA, TAU)) == 3
    assert S.classify_piece((SIGMA_INV, TAU)) == 4


def test_paradox_law_examples():
    w = (TAU_INV, SIGMA)
    assert S.classify_piece(w) == 2
    assert S.word_mul((TAU,), w) == (SIGMA,)
    # sigma is not in A1, so it must be tau times a word of A2
    assert S.classify_piece((SIGMA,)) != 1
    assert S.classify_piece(S.word_mul((TAU_INV,), (SIGMA,))) == 2


def test_decomposition_exhaustive():
    cert = S.decomposition_check(6)
    assert cert["total"] == 1 + sum(4 * 3 ** (j - 1) for j in range(1, 7))
    assert cert["ok"]
    big = S.decomposition_check(8)
    assert big["ok"] and big["partition"]


def test_fixed_axes():
    assert S.fixed_axis((TAU,)) == (0, 0, 1)
    assert S.fixed_axis((SIGMA,)) == (1, 0, 0)
    with pytest.raises(S.DegenerateKernel):
        S.fixed_axis(())


def test_eigen_equation_up_to_length_6():
    for w in S.words_up_to(6):
        if not w:
            continue
        v = S.fixed_axis(w)
        assert S.matvec(S.word_to_matrix(w), v) == tuple(Fraction(c) for c in v)


def test_distinct_axes_filter_duplicates():
    axes = S.distinct_axes(30)
    vs = [v for v, _ in axes]
    for i, u in enumerate(vs):
        for v in vs[i + 1:]:
            assert not S.same_axis(u, v)
    assert vs[0] == (0, 0, 1) and vs[1] == (1, 0, 0)


def test_alpha_enclosures():
    cert = S.alpha_checks(128)
    assert cert["orthogonal"] and cert["det_contains_one"] and cert["axis_fixed"]
    assert cert["width_ok"] and cert["entry_width_ok"]


def test_alpha_enclosures_shrink_with_precision():
    from polyforge.evaluate import interval_width
    widths = []
    for prec in (32, 64, 128, 256):
        A = S.alpha_matrix(prec)
        widths.append(max(interval_width(x) for row in A for x in row))
    assert widths == sorted(widths, reverse=True)


def test_separation_two_axes():
    cert = S.separation_check(2, 64)
    assert cert["disjoint"] and cert["axes"] == [[0, 0, 1], [1, 0, 0]]


def test_separation_fifty():
    cert = S.separation_check(50, 128)
    assert cert["disjoint"] and cert["precision"] <= 512


def test_piece_classifier():
    res = S.piece16_classify((0, 0, 1), 10)
    assert res.in_D_star == "Yes" and res.witness == 1
    assert res.piece is not None and 1 <= res.piece <= 16
    other = S.piece16_classify((Fraction(3, 5), 0, Fraction(4, 5)), 200)
    assert other.piece is None and other.in_D_star == "Unknown"
    with pytest.raises(S.NotOnSphere):
        S.piece16_classify((1, 1, 0), 10)


def test_point_on_rotated_axis_is_found():
    # (3/5, 4/5, 0) is the axis of tau^-1 sigma tau, so it lies in D
    w = (TAU_INV, SIGMA, TAU)
    assert S.same_axis(S.fixed_axis(w), (3, 4, 0))
    res = S.piece16_classify((Fraction(3, 5), Fraction(4, 5), 0), 1000)
    assert res.in_D_star == "Yes"
    assert S.enum_word(res.witness) and S.same_axis(S.fixed_axis(S.enum_word(res.witness)), (3, 4, 0))


def test_classifier_is_deterministic():
    p = (Fraction(2, 7), Fraction(3, 7), Fraction(6, 7))
    assert S.piece16_classify(p, 50) == S.piece16_classify(p, 50)
