"""
Tests for groups/services/pipeline.py

Covers fixture loading, the van Kampen gluings, every construction stage
against its golden fixture, sabotaged fixtures and the full report.
"""

import shutil

import pytest

from groups.services import pipeline
from groups.services.abelian import abelianization
from groups.services.coset_enumeration import EnumerationConfig, Verdict, is_trivial_with_annotations
from groups.services.pipeline import (
    FIXTURE_NAMES,
    KILLED,
    FixtureError,
    GluingSpec,
    Identification,
    build_pi1_U,
    build_pi1_X,
    build_x_k_complement,
    build_y_k,
    drop_relators,
    fixture,
    fixture_names,
    fixtures_dir,
    golden_comparison,
    meridian_relator,
    run_reproduction_pipeline,
    second_copy,
    u_gluing,
    van_kampen_sum,
    x_gluing,
)
from groups.services.presentation import free_product, normalized_relators, remove_relator
from groups.services.words import Word, commutator

pytestmark = [pytest.mark.services, pytest.mark.integration]

x, b, d, y, z, f = Word.generators('x', 'b', 'd', 'y', 'z', 'f')

SMALL = EnumerationConfig(max_cosets=10)


@pytest.fixture
def sabotaged_fixtures(tmp_path):
    """A copy of the fixture tree whose Y_K complement lost the dx relation."""
    target = tmp_path / 'fixtures'
    shutil.copytree(fixtures_dir(), target)
    path = target / 'y_k_complement.grp'
    lines = path.read_text(encoding='utf-8').splitlines(keepends=True)
    path.write_text(''.join(line for line in lines if 'dx:' not in line), encoding='utf-8')
    return target


# ──────────────────────────────────────────────────────────────────────────────
# Fixtures
# ──────────────────────────────────────────────────────────────────────────────

class TestFixtures:

    def test_shipped_names(self):
        assert fixture_names() == sorted(FIXTURE_NAMES)

    @pytest.mark.parametrize("name", FIXTURE_NAMES)
    def test_every_fixture_loads_and_validates(self, name):
        assert fixture(name).label == name

    def test_unknown_fixture(self):
        with pytest.raises(FixtureError, match='unknown fixture'):
            fixture('nope')

    def test_fixture_that_does_not_parse(self, tmp_path):
        (tmp_path / 'broken.grp').write_text('group broken { gens: a', encoding='utf-8')
        with pytest.raises(FixtureError, match='does not parse'):
            fixture('broken', tmp_path)

    def test_invalid_fixture(self, tmp_path):
        (tmp_path / 'bad.grp').write_text('group bad { gens: a; rels: a q; }', encoding='utf-8')
        with pytest.raises(FixtureError, match='invalid'):
            fixture('bad', tmp_path)

    def test_golden_sizes(self):
        assert fixture('pi1_X_golden').rank == 10
        assert len(fixture('pi1_X_golden').relators) == 22
        assert len(fixture('pi1_U_golden').relators) == 16
        assert len(fixture('x_k_explicit').annotations) == 3


# ──────────────────────────────────────────────────────────────────────────────
# Gluing
# ──────────────────────────────────────────────────────────────────────────────

class TestGluing:

    def test_free_product_of_the_y_k_pieces(self):
        product, renames = free_product(fixture('c_s'), fixture('c_f'))
        assert product.rank == 7
        assert len(product.relators) == 3 + 5
        assert renames == {}

    def test_meridian_with_partner(self):
        spec = GluingSpec('l', 'r', (), meridian_left=x, meridian_right=z, meridian_orientation=-1)
        assert meridian_relator(spec) == x * z

    def test_killed_meridian(self):
        spec = GluingSpec('l', 'r', (), meridian_left=commutator(x, b))
        assert spec.meridian_right is KILLED
        assert meridian_relator(spec) == commutator(x, b)

    def test_orientation_must_be_a_sign(self):
        with pytest.raises(FixtureError):
            GluingSpec('l', 'r', (), meridian_left=x, meridian_orientation=2)

    def test_labels_must_match(self):
        spec = GluingSpec('c_s', 'c_f', (), meridian_left=x)
        with pytest.raises(FixtureError, match='gluing expects'):
            van_kampen_sum(fixture('c_f'), fixture('c_s'), spec)

    def test_words_must_live_on_their_side(self):
        spec = GluingSpec('c_s', 'c_f', (Identification(d, x),), meridian_left=x)
        with pytest.raises(FixtureError, match='outside'):
            van_kampen_sum(fixture('c_s'), fixture('c_f'), spec)

    def test_second_copy_renames(self):
        copy = second_copy(fixture('y_k_complement'))
        assert copy.generators == ('e', 'f', 'z', 's', 't')
        assert copy.label == 'y_k_complement_2'

    def test_drop_relators_matches_up_to_normalization(self):
        p = fixture('c_s')
        dropped = drop_relators(p, [commutator(b, x)])
        assert len(dropped.relators) == len(p.relators) - 1


# ──────────────────────────────────────────────────────────────────────────────
# Construction stages
# ──────────────────────────────────────────────────────────────────────────────

class TestStages:

    def test_y_k_matches_golden(self):
        built = build_y_k()
        comparison = golden_comparison(built, fixture('y_k'))
        assert comparison['match'], comparison
        assert abelianization(built) == abelianization(fixture('y_k'))
        assert set(built.generators) == {'a', 'b', 'x', 'd', 'y'}

    def test_y_k_reversed_gluing_has_the_same_abelianization(self):
        assert abelianization(build_y_k(orientation=-1)) == abelianization(fixture('y_k'))

    def test_x_k_complement_matches_explicit_fixture(self):
        built = build_x_k_complement()
        assert golden_comparison(built, fixture('x_k_explicit'))['match']
        assert built.rank == 10
        assert built.annotations

    def test_pi1_X_matches_golden_up_to_the_meridian(self):
        built = build_pi1_X()
        comparison = golden_comparison(built, fixture('pi1_X_golden'), [meridian_relator(x_gluing())])
        assert comparison['match'], comparison
        assert comparison['tolerated']

    def test_pi1_X_reversed_meridian(self):
        built = build_pi1_X(orientation=-1)
        comparison = golden_comparison(built, fixture('pi1_X_golden'), [meridian_relator(x_gluing(-1))])
        assert comparison['match'], comparison

    def test_reversed_meridian_changes_the_relators(self):
        forward, reversed_ = build_pi1_X(), build_pi1_X(orientation=-1)
        assert normalized_relators(forward) != normalized_relators(reversed_)
        assert abelianization(forward) == abelianization(reversed_)

    def test_u_meridian_is_killed(self):
        assert meridian_relator(u_gluing()) == commutator(x, b)

    def test_pi1_X_without_longitudes(self):
        built = build_pi1_X(without_longitudes=True)
        comparison = golden_comparison(built, fixture('pi1_X_golden'))
        missing = {str(w) for w in comparison['missing']}
        assert len(missing) == 2
        assert abelianization(built).is_trivial

    def test_pi1_U_matches_golden(self):
        comparison = golden_comparison(build_pi1_U(), fixture('pi1_U_golden'))
        assert comparison['match'], comparison

    def test_explicit_parts_have_trivial_abelianization(self):
        for built in (build_pi1_X(), build_pi1_X(orientation=-1), build_pi1_U()):
            h1 = abelianization(built)
            assert h1.is_trivial
            assert h1.explicit_part_only == bool(built.annotations)


# ──────────────────────────────────────────────────────────────────────────────
# Pipeline runs
# ──────────────────────────────────────────────────────────────────────────────

class TestRunPipeline:

    def test_charnum_only(self):
        report = run_reproduction_pipeline('charnum')
        assert report.requested == ('charnum',)
        assert report.ok
        assert report.charnum.ok
        assert report.stage('charnum').ok
        assert len(report.charnum.rows) == 8

    def test_construction_stages_without_enumeration(self):
        report = run_reproduction_pipeline(['fixtures', 'y_k', 'y_k_complement', 'x_k'])
        assert report.failed_stages() == []
        assert report.stage('y_k').golden['match']

    def test_small_coset_limit_makes_closed_stage_inconclusive(self):
        report = run_reproduction_pipeline(['pi1_U'], config=SMALL)
        stage = report.stage('pi1_U')
        assert not stage.ok
        assert stage.triviality.verdict == Verdict.INCONCLUSIVE
        assert stage.golden['match']

    def test_sabotaged_fixture_fails_the_dependent_stages(self, sabotaged_fixtures):
        report = run_reproduction_pipeline(
            ['fixtures', 'y_k_complement', 'x_k', 'pi1_X'],
            fixtures_directory=sabotaged_fixtures,
        )
        assert report.failed_stages() == ['y_k_complement', 'x_k', 'pi1_X']
        assert report.stage('x_k').golden['missing']
        closed = report.stage('pi1_X')
        assert closed.abelianization.free_rank > 0
        assert closed.triviality.verdict == Verdict.INCONCLUSIVE
        assert 'infinite' in ' '.join(closed.triviality.justification)

    @pytest.mark.parametrize("name", ["pi1_X_golden", "pi1_U_golden"])
    def test_golden_without_dx_is_not_trivial(self, name):
        damaged = remove_relator(fixture(name), 'dx')
        h1 = abelianization(damaged)
        assert (h1.free_rank, h1.torsion) == (1, ())
        assert is_trivial_with_annotations(damaged).verdict == Verdict.INCONCLUSIVE

    def test_broken_gluing_table_is_caught(self, monkeypatch):
        monkeypatch.setattr(pipeline, 'U_IDENTIFICATIONS', pipeline.U_IDENTIFICATIONS[:-1])
        report = run_reproduction_pipeline(['pi1_U'], config=SMALL)
        assert report.failed_stages() == ['pi1_U']
        assert report.stage('pi1_U').golden['missing']

    def test_stage_errors_are_recorded(self, tmp_path):
        report = run_reproduction_pipeline(['fixtures', 'y_k'], fixtures_directory=tmp_path)
        assert report.failed_stages() == ['fixtures', 'y_k']
        assert report.stage('y_k').error.startswith('FixtureError')

    def test_unexpected_stage_error_is_recorded(self, monkeypatch):
        def broken():
            raise RuntimeError('table unavailable')

        monkeypatch.setattr(pipeline, 'reproduce_char_table', broken)
        report = run_reproduction_pipeline(['charnum', 'y_k'])
        assert report.failed_stages() == ['charnum']
        assert report.stage('charnum').error == 'RuntimeError: table unavailable'
        assert report.charnum is None
        assert report.stage('y_k').ok

    def test_unknown_stages(self):
        with pytest.raises(FixtureError):
            run_reproduction_pipeline('Z')
        with pytest.raises(FixtureError):
            run_reproduction_pipeline(['pi1_Z'])

    def test_stage_lookup(self):
        report = run_reproduction_pipeline('charnum')
        with pytest.raises(KeyError):
            report.stage('pi1_X')

    @pytest.mark.slow
    def test_all_stages_pass(self):
        report = run_reproduction_pipeline('all')
        assert report.failed_stages() == []
        assert report.stage('pi1_X').triviality.is_trivial
        assert report.stage('pi1_U').triviality.is_trivial
        assert all(r.verified for r in report.scripts)
