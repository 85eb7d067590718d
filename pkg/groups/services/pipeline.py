"""
Construction pipeline for pi1(X) and pi1(U)

Fixture presentations are glued with Seifert-Van Kampen amalgamations:

    C_S * C_F                      -> Y_K
    Y_K complement * second copy   -> X_K complement
    X_K complement * Y4 complement -> X   (meridian killed)
    Y_K complement * Q complement  -> U   (meridian killed, [x, a] added)

Every stage is compared against the hand-transcribed golden fixture and,
for X and U, checked for triviality by coset enumeration of the explicit
part. Stage failures are recorded in the report; later stages still run.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings

from groups.services.abelian import abelianization
from groups.services.charnum import reproduce_char_table
from groups.services.coset_enumeration import (
    Decision,
    EnumerationConfig,
    Verdict,
    is_trivial_with_annotations,
)
from groups.services.derivation import check_scripts
from groups.services.dsl import ParseError, load_presentation, load_scripts
from groups.services.errors import FpgError
from groups.services.presentation import (
    Presentation,
    add_annotation,
    add_consequence,
    add_relator,
    amalgamate,
    compare_relators,
    explicit_part,
    free_product,
    normalized_relators,
    remove_relator,
    rename_generators,
    tietze_eliminate,
    validate,
    with_label,
)
from groups.services.words import Word, canonical_relator, commutator, concat, substitute

logger = logging.getLogger(__name__)


class FixtureError(FpgError):
    """Raised for an unknown fixture name or a fixture that does not parse or validate."""
    pass


FIXTURE_NAMES = (
    'trefoil',
    'mk_s1',
    'c_s',
    'c_f',
    'c_f_with_c',
    'y_k',
    'y_k_complement',
    'x_k_explicit',
    'y4_complement',
    'q_complement',
    'pi1_X_golden',
    'pi1_U_golden',
)

STAGES = (
    'fixtures',
    'y_k',
    'y_k_complement',
    'x_k',
    'pi1_X',
    'pi1_X_reversed_meridian',
    'pi1_X_without_longitudes',
    'pi1_U',
    'derivations',
    'charnum',
)

STAGE_GROUPS = {
    'X': ('fixtures', 'y_k', 'y_k_complement', 'x_k', 'pi1_X',
          'pi1_X_reversed_meridian', 'pi1_X_without_longitudes'),
    'U': ('fixtures', 'y_k', 'y_k_complement', 'pi1_U'),
    'charnum': ('charnum',),
    'all': STAGES,
}

# Second copy of Y_K in X_K
SECOND_COPY = {'a': 'e', 'b': 'f', 'x': 'z', 'd': 's', 'y': 't'}


def _w(*syllables):
    return Word.from_syllables(syllables)


def _g(name):
    return Word.generator(name)


# ============================================================================
# FIXTURES
# ============================================================================

def fixtures_dir():
    configured = getattr(settings, 'FPG', {}).get('FIXTURES_DIR')
    return Path(configured) if configured else Path(__file__).resolve().parents[1] / 'fixtures'


def derivations_dir(base=None):
    configured = getattr(settings, 'FPG', {}).get('DERIVATIONS_DIR')
    if base is None and configured:
        return Path(configured)
    return Path(base or fixtures_dir()) / 'derivations'


def fixture_names(directory=None):
    """Names of all .grp files in the fixtures directory."""
    return sorted(path.stem for path in Path(directory or fixtures_dir()).glob('*.grp'))


def fixture(name: str, directory=None) -> Presentation:
    """
    Load and validate a shipped presentation by name.

    Raises:
        FixtureError: Unknown name, unreadable file, parse error or violations
    """
    path = Path(directory or fixtures_dir()) / f"{name}.grp"
    if not path.is_file():
        raise FixtureError(f"unknown fixture {name!r} (no {path})")
    try:
        p = load_presentation(path)
    except ParseError as e:
        raise FixtureError(f"fixture {name!r} does not parse: {e}") from e
    except OSError as e:
        raise FixtureError(f"fixture {name!r} cannot be read: {e}") from e
    violations = validate(p)
    if violations:
        raise FixtureError(f"fixture {name!r} is invalid: {'; '.join(violations)}")
    return p


# ============================================================================
# GLUING
# ============================================================================

class KilledByExceptionalSphere:
    """Marks a meridian that bounds a disk on the other side and so dies."""

    def __repr__(self):
        return 'KILLED'


KILLED = KilledByExceptionalSphere()


@dataclass(frozen=True)
class Identification:
    left: Word
    right: Word
    label: str = ''


@dataclass(frozen=True)
class GluingSpec:
    """
    Boundary identifications of a fiber sum.

    With meridian_right given, the relator added is
    meridian_left * meridian_right^(-orientation); with KILLED it is
    meridian_left alone.
    """
    left_label: str
    right_label: str
    identifications: tuple
    meridian_left: Word
    meridian_right: object = KILLED
    meridian_orientation: int = 1
    meridian_label: str = 'meridian'

    def __post_init__(self):
        if self.meridian_orientation not in (1, -1):
            raise FixtureError(f"meridian orientation must be +1 or -1, got {self.meridian_orientation}")


def meridian_relator(g: GluingSpec, renames=None) -> Word:
    if isinstance(g.meridian_right, KilledByExceptionalSphere):
        return g.meridian_left
    right = _rename_word(g.meridian_right, renames or {})
    return concat(g.meridian_left, right ** -g.meridian_orientation)


def _rename_word(w, renames):
    return substitute(w, {old: _g(new) for old, new in renames.items()})


def van_kampen_sum(left: Presentation, right: Presentation, g: GluingSpec) -> Presentation:
    """
    Amalgamated free product of left and right along g.

    Raises:
        PresentationError: If a word uses symbols outside its side
        FixtureError: If the presentations do not carry the labels g expects
    """
    if left.label != g.left_label or right.label != g.right_label:
        raise FixtureError(
            f"gluing expects {g.left_label} and {g.right_label}, got {left.label} and {right.label}"
        )
    for side, p, words in (
        ('left', left, [i.left for i in g.identifications] + [g.meridian_left]),
        ('right', right, [i.right for i in g.identifications]
         + ([] if isinstance(g.meridian_right, KilledByExceptionalSphere) else [g.meridian_right])),
    ):
        unknown = sorted({s for w in words for s in w.symbols()} - set(p.generators))
        if unknown:
            raise FixtureError(f"{side} gluing words use symbols outside {p.label}: {unknown}")

    product, renames = free_product(left, right)
    pairs = [(i.left, _rename_word(i.right, renames)) for i in g.identifications]
    labels = [i.label or f"glue_{n}" for n, i in enumerate(g.identifications, start=1)]
    glued = amalgamate(product, pairs, labels)
    glued = add_relator(glued, meridian_relator(g, renames), g.meridian_label)
    logger.debug(
        f"van Kampen sum {left.label} + {right.label}: "
        f"{len(glued.generators)} generators, {len(glued.relators)} relators"
    )
    return glued


# Gluing words as (left word, right word, relator label)

Y_K_IDENTIFICATIONS = (
    Identification(_g('x'), _g('gamma1p'), 'x_gamma1p'),
    Identification(_g('b'), _g('gamma2p'), 'b_gamma2p'),
)

X_K_IDENTIFICATIONS = (
    Identification(_w(('a', -1), ('b', 1)), _g('s'), 'as'),
    Identification(_w(('b', -1), ('a', 1), ('b', 1), ('a', -1)), _g('t'), 'bt'),
    Identification(_g('d'), _w(('e', -1), ('f', 1)), 'de'),
    Identification(_g('y'), _w(('f', -1), ('e', 1), ('f', 1), ('e', -1)), 'ye'),
)

X_IDENTIFICATIONS = (
    Identification(_w(('a', -1), ('b', 1)), _g('alpha1'), 'glue_alpha1'),
    Identification(_w(('b', -1), ('a', 1), ('b', 1), ('a', -1)), _g('alpha2'), 'glue_alpha2'),
    Identification(_g('d'), _g('alpha3'), 'glue_alpha3'),
    Identification(_g('y'), _g('alpha4'), 'glue_alpha4'),
)

U_IDENTIFICATIONS = (
    Identification(_w(('a', -1), ('b', 1)), _g('h'), 'ah'),
    Identification(_w(('b', -1), ('a', 1), ('b', 1), ('a', -1)), _g('z'), 'bz'),
    Identification(_g('d'), _w(('g', -1), ('h', 1)), 'dg'),
    Identification(_g('y'), _w(('h', -1), ('g', 1), ('h', 1), ('g', -1)), 'yg'),
)

LONGITUDE = _w(('a', 1), ('b', 2), ('a', 1), ('b', -4))
XB = commutator(_g('x'), _g('b'))
XA = commutator(_g('x'), _g('a'))
ZF = commutator(_g('z'), _g('f'))


def y_k_gluing(orientation=1):
    return GluingSpec(
        left_label='c_s',
        right_label='c_f',
        identifications=Y_K_IDENTIFICATIONS,
        meridian_left=LONGITUDE,
        meridian_right=commutator(_g('d'), _g('y')),
        meridian_orientation=orientation,
        meridian_label='long',
    )


def x_k_gluing(orientation=1):
    return GluingSpec(
        left_label='y_k_complement',
        right_label='y_k_complement_2',
        identifications=X_K_IDENTIFICATIONS,
        meridian_left=XB,
        meridian_right=ZF,
        meridian_orientation=orientation,
    )


def x_gluing(orientation=1):
    return GluingSpec(
        left_label='x_k_complement',
        right_label='y4_complement',
        identifications=X_IDENTIFICATIONS,
        meridian_left=concat(XB, ZF ** -orientation),
        meridian_right=KILLED,
    )


def u_gluing():
    """The meridian [x, b] bounds a disk in Q and dies, so there is no orientation to choose."""
    return GluingSpec(
        left_label='y_k_complement',
        right_label='q_complement',
        identifications=U_IDENTIFICATIONS,
        meridian_left=XB,
        meridian_right=KILLED,
    )


# ============================================================================
# STAGES
# ============================================================================

def build_y_k(orientation=1, directory=None) -> Presentation:
    """pi1(Y_K) from C_S and C_F, with gamma1' and gamma2' eliminated."""
    glued = van_kampen_sum(fixture('c_s', directory), fixture('c_f', directory), y_k_gluing(orientation))
    glued = tietze_eliminate(glued, 'gamma1p', _g('x'))
    glued = tietze_eliminate(glued, 'gamma2p', _g('b'))
    return with_label(glued, 'y_k')


def y_k_complement(directory=None) -> Presentation:
    return fixture('y_k_complement', directory)


def second_copy(p: Presentation) -> Presentation:
    return with_label(rename_generators(p, SECOND_COPY), f"{p.label}_2")


def build_x_k(orientation=1, directory=None) -> Presentation:
    """Two copies of the Y_K complement glued along the genus-2 surface."""
    left = y_k_complement(directory)
    return with_label(van_kampen_sum(left, second_copy(left), x_k_gluing(orientation)), 'x_k')


def build_x_k_complement(orientation=1, directory=None) -> Presentation:
    """X_K minus the surface: meridian relation dropped, recorded as a normal closure."""
    x_k = build_x_k(orientation, directory)
    complement = remove_relator(x_k, 'meridian')
    complement = add_annotation(
        complement,
        "auxiliary generators in the normal closure of the meridian",
        [concat(XB, ZF ** -orientation)],
    )
    return with_label(complement, 'x_k_complement')


def build_pi1_X(orientation=1, without_longitudes=False, directory=None) -> Presentation:
    """
    pi1(X): X_K complement glued with the Y4 complement, meridian killed.

    alpha1 and alpha2 are eliminated through the X_K relators a^-1 b = s and
    b^-1 a b a^-1 = t; alpha3 and alpha4 are d and y.
    """
    left = build_x_k_complement(orientation, directory)
    glued = van_kampen_sum(left, fixture('y4_complement', directory), x_gluing(orientation))
    glued = add_consequence(glued, [('glue_alpha1', -1), ('as', 1)], 'alpha1_s')
    glued = add_consequence(glued, [('glue_alpha2', -1), ('bt', 1)], 'alpha2_t')
    glued = tietze_eliminate(glued, 'alpha1', _g('s'))
    glued = tietze_eliminate(glued, 'alpha2', _g('t'))
    glued = tietze_eliminate(glued, 'alpha3', _g('d'))
    glued = tietze_eliminate(glued, 'alpha4', _g('y'))
    if without_longitudes:
        golden = fixture('x_k_explicit', directory)
        glued = drop_relators(glued, [golden.relator('long'), golden.relator('long2')])
    return with_label(glued, 'pi1_X')


def build_pi1_U(directory=None) -> Presentation:
    """pi1(U): Y_K complement glued with the Q complement; killing [x, b] turns the last auxiliary relator into [x, a]."""
    glued = van_kampen_sum(y_k_complement(directory), fixture('q_complement', directory), u_gluing())
    glued = add_relator(glued, XA, 'xa')
    return with_label(glued, 'pi1_U')


def drop_relators(p: Presentation, words) -> Presentation:
    """Remove every relator equal to one of words up to normalization."""
    targets = {canonical_relator(w, p.generators) for w in words}
    for index in reversed(range(len(p.relators))):
        if canonical_relator(p.relators[index], p.generators) in targets:
            p = remove_relator(p, index)
    return p


def golden_comparison(built: Presentation, golden: Presentation, tolerated=()) -> dict:
    """
    Normalized relator comparison; extras listed in tolerated do not break the match.

    Returns:
        dict: missing, extra, tolerated (extras that were allowed), match
    """
    result = compare_relators(built, golden)
    allowed = {canonical_relator(w, golden.generators) for w in tolerated}
    tolerated_extra = [w for w in result['extra'] if w in allowed]
    extra = [w for w in result['extra'] if w not in allowed]
    generators_match = set(built.generators) == set(golden.generators)
    return {
        'missing': result['missing'],
        'extra': extra,
        'tolerated': tolerated_extra,
        'generators_match': generators_match,
        'match': not result['missing'] and not extra and generators_match,
    }


# ============================================================================
# REPORT
# ============================================================================

@dataclass(frozen=True)
class StageResult:
    name: str
    ok: bool
    presentation: Presentation = None
    abelianization: object = None
    triviality: object = None
    golden: dict = None
    notes: tuple = ()
    error: str = ''


@dataclass(frozen=True)
class PipelineReport:
    stages: tuple = ()
    scripts: tuple = ()
    charnum: object = None
    requested: tuple = field(default_factory=tuple)

    @property
    def ok(self):
        return all(stage.ok for stage in self.stages)

    def failed_stages(self):
        return [stage.name for stage in self.stages if not stage.ok]

    def stage(self, name):
        for stage in self.stages:
            if stage.name == name:
                return stage
        raise KeyError(name)


class _Run:
    """Carries directory and enumeration config through one pipeline run."""

    def __init__(self, config, directory, scripts_directory):
        self.config = config
        self.directory = directory
        self.scripts_directory = scripts_directory
        self.scripts = ()
        self.char_table = None

    def fixtures(self):
        notes = []
        problems = []
        for name in FIXTURE_NAMES:
            try:
                p = fixture(name, self.directory)
            except FixtureError as e:
                problems.append(str(e))
                continue
            notes.append(f"{name}: {p.rank} generators, {len(p.relators)} relators, "
                         f"{len(p.annotations)} annotations")
        return StageResult('fixtures', ok=not problems, notes=tuple(notes + problems),
                           error='; '.join(problems))

    def y_k(self):
        built = build_y_k(directory=self.directory)
        golden = fixture('y_k', self.directory)
        comparison = golden_comparison(built, golden)
        h1, golden_h1 = abelianization(built), abelianization(golden)
        notes = (f"H1 {h1}; golden H1 {golden_h1}",)
        return StageResult('y_k', ok=comparison['match'] and h1 == golden_h1, presentation=built,
                           abelianization=h1, golden=comparison, notes=notes)

    def y_k_complement(self):
        complement = y_k_complement(self.directory)
        closed = explicit_part(add_relator(add_relator(complement, XB), XA))
        golden = fixture('y_k', self.directory)
        same = normalized_relators(closed, golden.generators) == normalized_relators(golden, golden.generators)
        notes = ("killing [x, b] and adding [x, a] gives back pi1(Y_K)" if same
                 else "killing [x, b] and adding [x, a] does not give back pi1(Y_K)",)
        return StageResult('y_k_complement', ok=same and not validate(complement), presentation=complement,
                           abelianization=abelianization(explicit_part(complement)), notes=notes)

    def x_k(self):
        built = build_x_k_complement(directory=self.directory)
        comparison = golden_comparison(built, fixture('x_k_explicit', self.directory))
        return StageResult('x_k', ok=comparison['match'], presentation=built,
                           abelianization=abelianization(explicit_part(built)), golden=comparison)

    def _closed(self, name, built, golden_name, tolerated, notes=()):
        comparison = None
        if golden_name:
            comparison = golden_comparison(built, fixture(golden_name, self.directory), tolerated)
        h1 = abelianization(explicit_part(built))
        triviality = is_trivial_with_annotations(built, self.config)
        ok = triviality.verdict == Verdict.TRIVIAL and h1.is_trivial
        if comparison is not None:
            ok = ok and comparison['match']
            if comparison['tolerated']:
                words = ', '.join(str(w) for w in comparison['tolerated'])
                notes = tuple(notes) + (f"meridian relator(s) {words} added by the gluing are not printed "
                                        f"in the golden presentation",)
        return StageResult(name, ok=ok, presentation=built, abelianization=h1,
                           triviality=triviality, golden=comparison, notes=tuple(notes))

    def pi1_X(self, orientation=1):
        built = build_pi1_X(orientation, directory=self.directory)
        tolerated = [meridian_relator(x_gluing(orientation))]
        notes = ("the auxiliary relator family is never written out; the golden fixture omits it "
                 "and the triviality argument does not use it",)
        name = 'pi1_X' if orientation == 1 else 'pi1_X_reversed_meridian'
        return self._closed(name, built, 'pi1_X_golden', tolerated, notes)

    def pi1_X_reversed_meridian(self):
        return self.pi1_X(orientation=-1)

    def pi1_X_without_longitudes(self):
        built = build_pi1_X(without_longitudes=True, directory=self.directory)
        return self._closed('pi1_X_without_longitudes', built, None, (),
                            ("both longitude relations removed",))

    def pi1_U(self):
        built = build_pi1_U(directory=self.directory)
        return self._closed('pi1_U', built, 'pi1_U_golden', ())

    def derivations(self):
        scripts = load_scripts(self.scripts_directory)
        presentations = {}
        for label in dict.fromkeys(script.presentation_label for script in scripts):
            try:
                presentations[label] = fixture(label, self.directory)
            except FixtureError as e:
                logger.warning(f"derivations: {e}")
        reports, env = check_scripts(scripts, presentations, oracle=True, oracle_config=self.config)
        self.scripts = tuple(reports)
        failed = [r.script for r in reports if not r.verified]
        refuted = [r.script for r in reports if r.oracle == Decision.FALSE]
        inconclusive = [r.script for r in reports if r.verified and r.oracle == Decision.INCONCLUSIVE]
        notes = [f"{len(reports) - len(failed)} of {len(reports)} scripts verified"]
        if failed:
            notes.append(f"failed: {', '.join(failed)}")
        if refuted:
            notes.append(f"oracle disagrees: {', '.join(refuted)}")
        if inconclusive:
            notes.append(f"oracle inconclusive (enumeration did not complete): {', '.join(inconclusive)}")
        return StageResult('derivations', ok=bool(reports) and not failed and not refuted, notes=tuple(notes))

    def charnum(self):
        table = reproduce_char_table()
        self.char_table = table
        return StageResult('charnum', ok=table.ok, notes=tuple(table.mismatches))


def run_reproduction_pipeline(stages='all', config: EnumerationConfig = None, fixtures_directory=None,
                              scripts_directory=None) -> PipelineReport:
    """
    Run the requested stages and collect one report.

    Args:
        stages: A STAGE_GROUPS key or an iterable of stage names
        config: EnumerationConfig for the triviality checks and oracles
        fixtures_directory: Directory holding the .grp fixtures
        scripts_directory: Directory holding the .drv scripts

    Returns:
        PipelineReport: One StageResult per stage, failures included
    """
    if isinstance(stages, str):
        if stages not in STAGE_GROUPS:
            raise FixtureError(f"unknown stage group {stages!r}; expected one of {sorted(STAGE_GROUPS)}")
        names = STAGE_GROUPS[stages]
    else:
        names = tuple(stages)
        unknown = [name for name in names if name not in STAGES]
        if unknown:
            raise FixtureError(f"unknown stages {unknown}")

    config = config or EnumerationConfig.from_settings()
    directory = Path(fixtures_directory) if fixtures_directory else fixtures_dir()
    scripts_directory = Path(scripts_directory) if scripts_directory else derivations_dir(fixtures_directory)
    run = _Run(config, directory, scripts_directory)

    results = []
    for name in names:
        logger.info(f"stage {name}: starting")
        try:
            result = getattr(run, name)()
        except (FpgError, OSError) as e:
            result = StageResult(name, ok=False, error=f"{type(e).__name__}: {e}")
        except Exception as e:
            logger.exception(f"stage {name}: unexpected error")
            result = StageResult(name, ok=False, error=f"{type(e).__name__}: {e}")
        if result.ok:
            logger.info(f"stage {name}: ok")
        else:
            logger.warning(f"stage {name}: FAILED {result.error or '; '.join(result.notes)}")
        results.append(result)

    return PipelineReport(stages=tuple(results), scripts=run.scripts, charnum=run.char_table,
                          requested=tuple(names))
