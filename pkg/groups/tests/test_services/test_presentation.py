"""
Tests for groups/services/presentation.py

Covers validation, relator moves, generator moves (Tietze), free products
and normalized comparison.
"""

import pytest

from groups.services.presentation import (
    NormalClosureAnnotation,
    Presentation,
    PresentationError,
    add_annotation,
    add_consequence,
    add_generator,
    add_relator,
    amalgamate,
    compare_relators,
    explicit_part,
    free_group,
    free_product,
    normalized_relators,
    remove_relator,
    rename_generators,
    substitute,
    tietze_eliminate,
    validate,
)
from groups.services.words import EMPTY_WORD, Word, commutator

pytestmark = [pytest.mark.services, pytest.mark.unit]

a, b, x, c = Word.generators('a', 'b', 'x', 'c')
A, B, X = a.inverse(), b.inverse(), x.inverse()


@pytest.fixture
def trefoil():
    return Presentation(
        label='trefoil',
        generators=('a', 'b'),
        relators=(a * b * a * B * A * B,),
        relator_labels=('aba',),
    )


# ──────────────────────────────────────────────────────────────────────────────
# Presentation value
# ──────────────────────────────────────────────────────────────────────────────

class TestPresentation:

    def test_unlabeled_relators_get_empty_labels(self):
        p = Presentation('p', ('a',), (a * a,))
        assert p.relator_labels == ('',)

    def test_label_count_must_match(self):
        with pytest.raises(PresentationError):
            Presentation('p', ('a',), (a,), ('one', 'two'))

    def test_relator_by_label_and_index(self, trefoil):
        assert trefoil.relator('aba') == trefoil.relator(0)

    def test_unknown_relator_reference(self, trefoil):
        with pytest.raises(PresentationError, match='no relator labelled'):
            trefoil.relator('nope')
        with pytest.raises(PresentationError, match='out of range'):
            trefoil.relator(3)

    def test_alphabet_ids_are_positions(self, trefoil):
        assert [(s.name, s.id) for s in trefoil.alphabet] == [('a', 0), ('b', 1)]


class TestValidate:

    def test_valid_presentation_has_no_violations(self, trefoil):
        assert validate(trefoil) == []

    def test_undeclared_symbol(self):
        p = Presentation('p', ('a',), (a * x,))
        assert any("undeclared symbol 'x'" in v for v in validate(p))

    def test_duplicate_generator(self):
        p = Presentation('p', ('a', 'a'))
        assert any('duplicate generator' in v for v in validate(p))

    def test_not_cyclically_reduced(self):
        p = Presentation('p', ('a', 'b'), (a * b * A,))
        assert any('not cyclically reduced' in v for v in validate(p))

    def test_empty_relator(self):
        p = Presentation('p', ('a',), (EMPTY_WORD,))
        assert any('is empty' in v for v in validate(p))

    def test_duplicate_label(self):
        p = Presentation('p', ('a', 'b'), (a, b), ('r', 'r'))
        assert any('duplicate relator label' in v for v in validate(p))

    def test_annotation_outside_alphabet(self, trefoil):
        p = Presentation(
            'p', trefoil.generators, trefoil.relators,
            annotations=(NormalClosureAnnotation('aux', (commutator(x, b),)),),
        )
        assert any('annotation' in v for v in validate(p))


# ──────────────────────────────────────────────────────────────────────────────
# Relator moves
# ──────────────────────────────────────────────────────────────────────────────

class TestRelatorMoves:

    def test_add_relator_cyclically_reduces(self, trefoil):
        p = add_relator(trefoil, b * a * a * B, 'sq')
        assert p.relator('sq') == a * a

    def test_add_empty_relator_is_noop(self, trefoil):
        assert add_relator(trefoil, a * A) == trefoil

    def test_add_relator_deduplicates_label(self, trefoil):
        p = add_relator(trefoil, a ** 2, 'aba')
        assert p.relator_labels == ('aba', 'aba_2')

    def test_add_relator_rejects_unknown_symbol(self, trefoil):
        with pytest.raises(PresentationError):
            add_relator(trefoil, x)

    def test_input_is_unchanged(self, trefoil):
        add_relator(trefoil, a ** 2)
        assert len(trefoil.relators) == 1

    def test_remove_relator(self, trefoil):
        assert remove_relator(trefoil, 'aba').relators == ()

    def test_add_consequence(self):
        p = Presentation('p', ('a', 'b', 'c'), (a * B, A * b * c.inverse()), ('ab', 'abc'))
        # (a b^-1)^-1 (a^-1 b c^-1) = b a^-1 a^-1 b c^-1 ; cyclically reduced
        q = add_consequence(p, [('ab', -1), ('abc', 1)], 'combo')
        assert q.relator('combo') == b * A * A * b * c.inverse()

    def test_amalgamate_adds_u_v_inverse(self, trefoil):
        p = amalgamate(trefoil, [(a, b)], ['ab'])
        assert p.relator('ab') == a * B


class TestAnnotations:

    def test_add_annotation(self, trefoil):
        p = add_annotation(trefoil, 'aux', [commutator(a, b)])
        assert p.annotations[0].base_words == (commutator(a, b),)

    def test_annotation_needs_base_words(self, trefoil):
        with pytest.raises(PresentationError):
            add_annotation(trefoil, 'aux', [])

    def test_explicit_part_drops_annotations(self, trefoil):
        p = add_annotation(trefoil, 'aux', [a])
        assert explicit_part(p).annotations == ()


# ──────────────────────────────────────────────────────────────────────────────
# Generator moves
# ──────────────────────────────────────────────────────────────────────────────

class TestGeneratorMoves:

    def test_add_generator_then_eliminate_round_trips(self, trefoil):
        p = add_generator(trefoil, 'c', a * b, 'c_def')
        assert p.generators == ('a', 'b', 'c')
        q = tietze_eliminate(p, 'c', a * b)
        assert q.generators == ('a', 'b')
        assert normalized_relators(q) == normalized_relators(trefoil)

    def test_eliminate_substitutes_everywhere(self):
        g = Word.generator('g')
        p = Presentation(
            'p', ('x', 'b', 'g'),
            (x * g.inverse(), commutator(g, b)),
            ('def', 'comm'),
        )
        q = tietze_eliminate(p, 'g', x)
        assert q.relators == (commutator(x, b),)
        assert q.relator_labels == ('comm',)

    def test_eliminate_finds_rotated_defining_relator(self):
        g = Word.generator('g')
        p = Presentation('p', ('a', 'b', 'g'), (g.inverse() * a * B,))
        q = tietze_eliminate(p, 'g', a * B)
        assert q.generators == ('a', 'b')
        assert q.relators == ()

    def test_eliminate_without_defining_relator(self, trefoil):
        p = add_generator(trefoil, 'c', a)
        with pytest.raises(PresentationError, match='no relator defines'):
            tietze_eliminate(p, 'c', b)

    def test_eliminate_rejects_self_reference(self, trefoil):
        p = add_generator(trefoil, 'c', a)
        with pytest.raises(PresentationError):
            tietze_eliminate(p, 'c', c * a)

    def test_add_existing_generator(self, trefoil):
        with pytest.raises(PresentationError):
            add_generator(trefoil, 'a', b)

    def test_substitute_keeps_alphabet(self, trefoil):
        # a (a^2) a (a^-2) a^-1 (a^-2) = a^-1
        p = substitute(trefoil, 'b', a ** 2)
        assert p.generators == ('a', 'b')
        assert p.relators == (A,)

    def test_substitute_drops_trivial_relators(self, trefoil):
        assert substitute(trefoil, 'b', a).relators == ()

    def test_rename(self, trefoil):
        p = rename_generators(trefoil, {'a': 'e', 'b': 'f'})
        e, f = Word.generators('e', 'f')
        assert p.generators == ('e', 'f')
        assert p.relator('aba') == e * f * e * f.inverse() * e.inverse() * f.inverse()

    def test_rename_to_collision(self, trefoil):
        with pytest.raises(PresentationError, match='duplicate'):
            rename_generators(trefoil, {'a': 'b'})

    def test_rename_unknown(self, trefoil):
        with pytest.raises(PresentationError):
            rename_generators(trefoil, {'q': 'r'})


# ──────────────────────────────────────────────────────────────────────────────
# Products and comparison
# ──────────────────────────────────────────────────────────────────────────────

class TestFreeProduct:

    def test_disjoint_alphabets(self, trefoil):
        product, renames = free_product(trefoil, free_group('z', ['z']))
        assert product.generators == ('a', 'b', 'z')
        assert product.label == 'trefoil_z'
        assert renames == {}

    def test_colliding_generators_and_labels_are_suffixed(self, trefoil):
        product, renames = free_product(trefoil, trefoil)
        assert renames == {'a': 'a_2', 'b': 'b_2'}
        assert product.generators == ('a', 'b', 'a_2', 'b_2')
        assert product.relator_labels == ('aba', 'aba_2')
        assert validate(product) == []


class TestCompareRelators:

    def test_match_up_to_rotation_inversion_and_duplicates(self, trefoil):
        rotated = Presentation('q', ('a', 'b'), (B * a * b * a * B * A, a * b * a * B * A * B))
        assert compare_relators(rotated, trefoil)['match'] is True

    def test_reports_missing_and_extra(self, trefoil):
        other = Presentation('q', ('a', 'b'), (a ** 2,))
        result = compare_relators(other, trefoil)
        assert result['match'] is False
        assert result['missing'] == [a * b * a * B * A * B]
        assert result['extra'] == [a * a]
