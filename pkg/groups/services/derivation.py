"""
Derivation script checker

A script claims ``start = end`` in a presented group and justifies it with
elementary insertions: a relator (InsertRelator) or a previously verified
identity (UseIdentity), raised to +1/-1, conjugated, and spliced into the
current word at a position. After each insertion the word is freely
reduced; the script is verified when the last word equals ``end`` letter
for letter.

The checker never searches for proofs. It only replays them.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping

import networkx as nx

from groups.services.coset_enumeration import Decision, EnumerationError, word_is_identity
from groups.services.errors import FpgError
from groups.services.presentation import PresentationError
from groups.services.words import EMPTY_WORD, Word, concat, conjugate, invert

logger = logging.getLogger(__name__)


class DerivationError(FpgError):
    """Raised for an invalid step: bad reference, unknown identity, bad position."""
    pass


# ============================================================================
# SCRIPT TYPES
# ============================================================================

@dataclass(frozen=True)
class InsertRelator:
    relator_ref: object          # 0-based index or relator label
    exponent: int = 1
    position: int = 0
    conjugator: Word = EMPTY_WORD

    def describe(self):
        return f"insert relator {self.relator_ref}^{self.exponent:+d} at {self.position}"


@dataclass(frozen=True)
class UseIdentity:
    identity_name: str
    exponent: int = 1
    position: int = 0
    conjugator: Word = EMPTY_WORD

    def describe(self):
        return f"use identity {self.identity_name}^{self.exponent:+d} at {self.position}"


@dataclass(frozen=True)
class DerivationScript:
    name: str
    presentation_label: str
    start: Word
    steps: tuple = ()
    end: Word = EMPTY_WORD

    def dependencies(self):
        """Names of identities this script uses, in first-use order."""
        return list(dict.fromkeys(
            step.identity_name for step in self.steps if isinstance(step, UseIdentity)
        ))

    def identity_word(self):
        """start end^-1, the word the script proves trivial."""
        return concat(self.start, invert(self.end))


@dataclass(frozen=True)
class Identity:
    lhs: Word
    rhs: Word
    presentation_label: str = ''


@dataclass(frozen=True)
class DerivationEnvironment:
    """
    Verified identities available to UseIdentity steps.

    Immutable; ``extend`` returns a new environment.
    """
    identities: Mapping = field(default_factory=dict)

    def __contains__(self, name):
        return name in self.identities

    def __len__(self):
        return len(self.identities)

    def get(self, name):
        return self.identities.get(name)

    def extend(self, name, lhs, rhs, presentation_label=''):
        identities = dict(self.identities)
        identities[name] = Identity(lhs, rhs, presentation_label)
        return replace(self, identities=identities)

    def names(self):
        return sorted(self.identities)


class CheckVerdict(str, Enum):
    VERIFIED = 'verified'
    FAILED = 'failed'


@dataclass(frozen=True)
class CheckReport:
    script: str
    verdict: CheckVerdict
    step_index: int = None
    reason: str = ''
    word_before: Word = None
    trace: tuple = ()
    oracle: object = None

    @property
    def verified(self):
        return self.verdict == CheckVerdict.VERIFIED

    def with_oracle(self, decision):
        return replace(self, oracle=decision)


# ============================================================================
# CHECKING
# ============================================================================

def _inserted_word(step, p, env):
    if step.exponent not in (1, -1):
        raise DerivationError(f"exponent must be +1 or -1, got {step.exponent}")
    if isinstance(step, InsertRelator):
        try:
            base = p.relator(step.relator_ref)
        except PresentationError as e:
            raise DerivationError(str(e)) from None
    elif isinstance(step, UseIdentity):
        identity = env.get(step.identity_name)
        if identity is None:
            raise DerivationError(f"identity {step.identity_name!r} is not verified in this environment")
        if identity.presentation_label and identity.presentation_label != p.label:
            raise DerivationError(
                f"identity {step.identity_name!r} was verified in {identity.presentation_label}, "
                f"not in {p.label}"
            )
        base = concat(identity.lhs, invert(identity.rhs))
    else:
        raise DerivationError(f"unknown step kind {type(step).__name__}")
    return conjugate(base ** step.exponent, step.conjugator)


def apply_step(w: Word, step, p, env: DerivationEnvironment = None) -> Word:
    """
    Splice one relator (or verified identity) occurrence into w.

    Returns reduce(prefix * conjugator r^exponent conjugator^-1 * suffix) where
    w = prefix suffix is split at step.position.

    Raises:
        DerivationError: If the reference is invalid or the position is out of range
    """
    env = env or DerivationEnvironment()
    if not isinstance(step.position, int) or not 0 <= step.position <= len(w):
        raise DerivationError(f"position {step.position} out of range 0..{len(w)}")
    unknown = [s for s in step.conjugator.symbols() if s not in set(p.generators)]
    if unknown:
        raise DerivationError(f"conjugator uses symbols outside {p.label}: {unknown}")
    inserted = _inserted_word(step, p, env)
    return concat(w[:step.position], inserted, w[step.position:])


def _failed(script, step_index, reason, word_before, trace):
    logger.warning(f"{script.name}: failed at step {step_index}: {reason}")
    return CheckReport(
        script=script.name,
        verdict=CheckVerdict.FAILED,
        step_index=step_index,
        reason=reason,
        word_before=word_before,
        trace=tuple(trace),
    )


def check_script(script: DerivationScript, p, env: DerivationEnvironment = None) -> CheckReport:
    """
    Replay a script from start and compare the final word with end.

    Never raises: invalid steps become a Failed verdict at that step, and a
    final mismatch is reported at step_index == len(script.steps).
    """
    env = env or DerivationEnvironment()
    if script.presentation_label != p.label:
        return _failed(
            script, None,
            f"script is written for {script.presentation_label}, not {p.label}",
            script.start, (),
        )
    known = set(p.generators)
    outside = sorted({s for word in (script.start, script.end) for s in word.symbols()} - known)
    if outside:
        return _failed(script, None, f"start/end use symbols outside {p.label}: {outside}", script.start, ())

    word = script.start
    trace = [word]
    for index, step in enumerate(script.steps):
        try:
            word = apply_step(word, step, p, env)
        except DerivationError as e:
            return _failed(script, index, f"{step.describe()}: {e}", word, trace)
        trace.append(word)

    if word != script.end:
        return _failed(
            script, len(script.steps),
            f"final word {word} differs from end {script.end}",
            word, trace,
        )
    logger.info(f"{script.name}: verified in {len(script.steps)} steps")
    return CheckReport(script=script.name, verdict=CheckVerdict.VERIFIED, trace=tuple(trace))


def oracle_check(script: DerivationScript, p, config=None):
    """
    Independent check of start = end by coset enumeration of p.

    Returns:
        Decision: TRUE, FALSE or INCONCLUSIVE
    """
    try:
        return word_is_identity(p, script.identity_word(), config)
    except EnumerationError as e:
        logger.warning(f"{script.name}: oracle could not run: {e}")
        return Decision.INCONCLUSIVE


def order_scripts(scripts: Iterable[DerivationScript]) -> list:
    """
    Order scripts so every identity is checked before the scripts using it.

    Ties keep the given order. Uses of identities not among the scripts are
    left to the environment.

    Raises:
        DerivationError: On duplicate script names or a dependency cycle
    """
    scripts = list(scripts)
    position = {}
    for index, script in enumerate(scripts):
        if script.name in position:
            raise DerivationError(f"duplicate script name {script.name!r}")
        position[script.name] = index

    graph = nx.DiGraph()
    graph.add_nodes_from(position)
    for script in scripts:
        for dependency in script.dependencies():
            if dependency in position:
                graph.add_edge(dependency, script.name)
    try:
        order = list(nx.lexicographical_topological_sort(graph, key=position.get))
    except nx.NetworkXUnfeasible:
        cycle = nx.find_cycle(graph)
        raise DerivationError(f"derivation scripts depend on each other cyclically: {cycle}") from None
    return [scripts[position[name]] for name in order]


def check_scripts(scripts, presentations, env: DerivationEnvironment = None, oracle_config=None, oracle=False):
    """
    Check scripts in dependency order, growing the environment as they verify.

    Args:
        scripts: Iterable of DerivationScript
        presentations: Presentation, or mapping of label to Presentation
        env: Starting environment
        oracle: Also run oracle_check on every verified script
        oracle_config: EnumerationConfig for the oracle

    Returns:
        tuple: (list of CheckReport in checking order, final environment)
    """
    env = env or DerivationEnvironment()
    if not isinstance(presentations, Mapping):
        presentations = {presentations.label: presentations}

    reports = []
    for script in order_scripts(scripts):
        p = presentations.get(script.presentation_label)
        if p is None:
            reports.append(_failed(
                script, None, f"no presentation labelled {script.presentation_label}", script.start, (),
            ))
            continue
        report = check_script(script, p, env)
        if report.verified:
            env = env.extend(script.name, script.start, script.end, p.label)
            if oracle:
                report = report.with_oracle(oracle_check(script, p, oracle_config))
        reports.append(report)
    return reports, env
