"""
Tests for groups/services/abelian.py

Smith normal form is checked against the determinantal-divisor
characterization: d1 d2 ... dk is the gcd of all k x k minors.
"""

import math
from itertools import combinations

import factory
import pytest
import sympy

from groups.services.abelian import (
    AbelianGroup,
    IntMatrix,
    SmithNormalFormError,
    abelianization,
    relation_matrix,
    smith_normal_form,
)
from groups.services.pipeline import fixture
from groups.services.presentation import (
    Presentation,
    add_consequence,
    add_generator,
    tietze_eliminate,
)
from groups.services.words import Word
from groups.tests.factories import PresentationFactory, random_word

pytestmark = [pytest.mark.services, pytest.mark.unit]


def determinantal_factors(rows):
    """Invariant factors from gcds of minors (slow, small matrices only)."""
    matrix = sympy.Matrix(rows)
    n_rows, n_cols = matrix.shape
    divisors = [1]
    for k in range(1, min(n_rows, n_cols) + 1):
        g = 0
        for r in combinations(range(n_rows), k):
            for c in combinations(range(n_cols), k):
                g = math.gcd(g, int(matrix.extract(list(r), list(c)).det()))
        if g == 0:
            break
        divisors.append(g)
    return tuple(divisors[k] // divisors[k - 1] for k in range(1, len(divisors)))


def random_matrix(n_rows, n_cols, bound=6):
    rng = factory.random.randgen
    return [[rng.randint(-bound, bound) for _ in range(n_cols)] for _ in range(n_rows)]


# ──────────────────────────────────────────────────────────────────────────────
# IntMatrix
# ──────────────────────────────────────────────────────────────────────────────

class TestIntMatrix:

    def test_round_trips_entries(self):
        assert IntMatrix([[1, -2], [3, 4]]).tolist() == [[1, -2], [3, 4]]

    def test_empty_matrix_keeps_column_count(self):
        assert IntMatrix([], cols=3).shape == (0, 3)

    def test_rejects_ragged_rows(self):
        with pytest.raises(SmithNormalFormError, match='ragged'):
            IntMatrix([[1, 2], [3]])

    @pytest.mark.parametrize("entry", [1.5, '2', True, None])
    def test_rejects_inexact_entries(self, entry):
        with pytest.raises(SmithNormalFormError):
            IntMatrix([[1, entry]])

    def test_big_entries_stay_exact(self):
        big = 10 ** 40
        diagonal, rank = smith_normal_form(IntMatrix([[big, 0], [0, big * 3]]))
        assert diagonal == (big, 3 * big)
        assert rank == 2


# ──────────────────────────────────────────────────────────────────────────────
# Smith normal form
# ──────────────────────────────────────────────────────────────────────────────

class TestSmithNormalForm:

    @pytest.mark.parametrize("rows,expected", [
        ([[2, 0], [0, 3]], (1, 6)),
        ([[4, 0], [0, 6]], (2, 12)),
        ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], (2, 6, 12)),
        ([[0, 0], [0, 0]], ()),
        ([[1, -1], [2, -2]], (1,)),
        ([[-5]], (5,)),
    ])
    def test_known_forms(self, rows, expected):
        diagonal, rank = smith_normal_form(IntMatrix(rows))
        assert diagonal == expected
        assert rank == len(expected)

    def test_no_rows(self):
        assert smith_normal_form(IntMatrix([], cols=2)) == ((), 0)

    def test_input_is_not_modified(self):
        m = IntMatrix([[4, 6], [6, 9]])
        smith_normal_form(m)
        assert m.tolist() == [[4, 6], [6, 9]]

    def test_matches_determinantal_divisors(self):
        factory.random.reseed_random('snf')
        rng = factory.random.randgen
        for _ in range(40):
            rows = random_matrix(rng.randint(1, 4), rng.randint(1, 4))
            diagonal, rank = smith_normal_form(IntMatrix(rows))
            assert diagonal == determinantal_factors(rows), rows
            assert rank == sympy.Matrix(rows).rank()

    def test_divisibility_chain(self):
        factory.random.reseed_random('divides')
        for _ in range(40):
            diagonal, _ = smith_normal_form(IntMatrix(random_matrix(4, 5, bound=20)))
            for smaller, larger in zip(diagonal, diagonal[1:]):
                assert larger % smaller == 0


# ──────────────────────────────────────────────────────────────────────────────
# Abelianization
# ──────────────────────────────────────────────────────────────────────────────

class TestAbelianization:

    @pytest.mark.parametrize("name,free_rank,torsion", [
        ('trefoil', 1, ()),
        ('mk_s1', 2, ()),
        ('c_s', 2, ()),
        ('c_f', 2, ()),
        ('y_k', 2, ()),
        ('q_complement', 2, ()),
        ('y4_complement', 4, ()),
        ('pi1_X_golden', 0, ()),
        ('pi1_U_golden', 0, ()),
        ('x_k_explicit', 0, ()),
    ])
    def test_fixtures(self, name, free_rank, torsion):
        h1 = abelianization(fixture(name))
        assert (h1.free_rank, h1.torsion) == (free_rank, torsion)

    def test_annotations_flag_explicit_part(self):
        assert abelianization(fixture('pi1_X_golden')).explicit_part_only is True
        assert abelianization(fixture('trefoil')).explicit_part_only is False

    def test_torsion(self):
        a, b = Word.generators('a', 'b')
        p = Presentation('p', ('a', 'b'), (a ** 4, b ** 6))
        h1 = abelianization(p)
        assert h1 == AbelianGroup(free_rank=0, torsion=(2, 12))
        assert str(h1) == 'Z/2 + Z/12'

    def test_free_group(self):
        h1 = abelianization(Presentation('f', ('a', 'b', 'c')))
        assert str(h1) == 'Z^3'

    def test_trivial_group_prints_zero(self):
        assert str(AbelianGroup(free_rank=0)) == '0'
        assert AbelianGroup(free_rank=0).is_trivial

    def test_relation_matrix_rows_follow_generator_order(self):
        assert relation_matrix(fixture('trefoil')).tolist() == [[1, -1]]

    def test_invariant_under_tietze_moves(self):
        factory.random.reseed_random('tietze')
        for _ in range(30):
            p = PresentationFactory()
            h1 = abelianization(p)

            defining = random_word(p.generators, 5)
            extended = add_generator(p, 'g', defining, 'g_def')
            assert abelianization(extended) == h1

            assert abelianization(tietze_eliminate(extended, 'g', defining)) == h1

            if p.relators:
                doubled = add_consequence(p, [(0, 1), (len(p.relators) - 1, -1)], 'combo')
                assert abelianization(doubled) == h1
