"""
Group presentations and Tietze transformations

A Presentation is an immutable value: every operation here returns a new
presentation and leaves its input untouched. Relations "u = v" are stored
as single cyclically reduced relators u v^-1; empty relators are dropped.

Relators may carry a label (unique per presentation) so that derivation
scripts and reports can refer to them by name; unlabeled relators are
referred to by their 0-based index.
"""

import logging
from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from groups.services.errors import FpgError
from groups.services.words import (
    EMPTY_WORD,
    GeneratorSymbol,
    Word,
    canonical_relator,
    concat,
    cyclic_reduce,
    invert,
    is_valid_generator_name,
    substitute as substitute_word,
)

logger = logging.getLogger(__name__)


class PresentationError(FpgError):
    """Raised when a presentation operation is given invalid input."""
    pass


@dataclass(frozen=True)
class NormalClosureAnnotation:
    """
    Records auxiliary generators/relators that are never written out.

    aux_description names the unknown family; base_words are explicit-alphabet
    words whose normal closure contains every auxiliary generator.
    """
    aux_description: str
    base_words: tuple = ()


@dataclass(frozen=True)
class Presentation:
    label: str
    generators: tuple = ()
    relators: tuple = ()
    relator_labels: tuple = ()   # parallel to relators; '' when unlabeled
    annotations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'generators', tuple(self.generators))
        object.__setattr__(self, 'relators', tuple(self.relators))
        labels = tuple(self.relator_labels) or ('',) * len(self.relators)
        if len(labels) != len(self.relators):
            raise PresentationError(
                f"{self.label}: {len(labels)} labels for {len(self.relators)} relators"
            )
        object.__setattr__(self, 'relator_labels', labels)
        object.__setattr__(self, 'annotations', tuple(self.annotations))

    @property
    def alphabet(self):
        return tuple(GeneratorSymbol(name, i) for i, name in enumerate(self.generators))

    @property
    def rank(self):
        return len(self.generators)

    def relator(self, ref):
        """
        Look up a relator by 0-based index or by label.

        Raises:
            PresentationError: If the reference matches nothing
        """
        return self.relators[self.relator_index(ref)]

    def relator_index(self, ref):
        if isinstance(ref, int):
            if 0 <= ref < len(self.relators):
                return ref
            raise PresentationError(
                f"{self.label}: relator index {ref} out of range (0..{len(self.relators) - 1})"
            )
        try:
            return self.relator_labels.index(ref)
        except ValueError:
            raise PresentationError(f"{self.label}: no relator labelled {ref!r}")

    def labelled_relators(self):
        return list(zip(self.relator_labels, self.relators))

    def __str__(self):
        return f"<{self.label}: {self.rank} generators, {len(self.relators)} relators>"


def free_group(label, names):
    return Presentation(label=label, generators=tuple(names))


# ============================================================================
# VALIDATION
# ============================================================================

def validate(p: Presentation) -> list:
    """
    Check the structural invariants of a presentation.

    Returns:
        list[str]: Human-readable violations; empty when the presentation is ok
    """
    violations = []
    known = set(p.generators)

    for name, count in Counter(p.generators).items():
        if count > 1:
            violations.append(f"duplicate generator {name!r}")
    for name in p.generators:
        if not is_valid_generator_name(name):
            violations.append(f"invalid generator name {name!r}")

    for i, (label, relator) in enumerate(p.labelled_relators()):
        where = f"relator {label or i}"
        for symbol in relator.symbols():
            if symbol not in known:
                violations.append(f"{where} uses undeclared symbol {symbol!r}")
        if not relator:
            violations.append(f"{where} is empty")
        elif cyclic_reduce(relator)[1]:
            violations.append(f"{where} is not cyclically reduced")

    labels = [label for label in p.relator_labels if label]
    for label, count in Counter(labels).items():
        if count > 1:
            violations.append(f"duplicate relator label {label!r}")
        if not is_valid_generator_name(label):
            violations.append(f"invalid relator label {label!r}")

    for annotation in p.annotations:
        if not annotation.base_words:
            violations.append(f"annotation {annotation.aux_description!r} has no base words")
        for word in annotation.base_words:
            for symbol in word.symbols():
                if symbol not in known:
                    violations.append(
                        f"annotation {annotation.aux_description!r} uses undeclared symbol {symbol!r}"
                    )
    return violations


def _require_symbols(p, words, context):
    known = set(p.generators)
    for word in words:
        for symbol in word.symbols():
            if symbol not in known:
                raise PresentationError(f"{context}: symbol {symbol!r} is not a generator of {p.label}")


def _fresh_label(taken, base):
    if base not in taken:
        return base
    n = 2
    while f"{base}_{n}" in taken:
        n += 1
    return f"{base}_{n}"


# ============================================================================
# RELATOR MOVES
# ============================================================================

def add_relator(p: Presentation, w: Word, label: str = '') -> Presentation:
    """
    Append the cyclically reduced form of w as a relator.

    Empty words are no-ops. A label that is already taken gets a numeric suffix.
    """
    _require_symbols(p, [w], 'add_relator')
    core, _ = cyclic_reduce(w)
    if not core:
        logger.debug(f"{p.label}: dropping empty relator {label or ''}")
        return p
    if label:
        label = _fresh_label(set(p.relator_labels), label)
    return replace(
        p,
        relators=p.relators + (core,),
        relator_labels=p.relator_labels + (label,),
    )


def remove_relator(p: Presentation, ref) -> Presentation:
    index = p.relator_index(ref)
    return replace(
        p,
        relators=p.relators[:index] + p.relators[index + 1:],
        relator_labels=p.relator_labels[:index] + p.relator_labels[index + 1:],
    )


def add_consequence(p: Presentation, factors: Sequence, label: str = '') -> Presentation:
    """
    Append a product of existing relators (a relator of the same group).

    Args:
        p: Presentation
        factors: Sequence of (relator_ref, exponent) pairs, multiplied in order
        label: Optional label for the new relator

    Returns:
        Presentation: p with the reduced product appended
    """
    product = EMPTY_WORD
    for ref, exponent in factors:
        product = concat(product, p.relator(ref) ** exponent)
    return add_relator(p, product, label)


def amalgamate(p: Presentation, identifications: Iterable, labels: Sequence = ()) -> Presentation:
    """
    Identify pairs of words: each (u, v) adds the relator u v^-1.

    Raises:
        PresentationError: If a word mentions a symbol outside p
    """
    identifications = list(identifications)
    labels = list(labels) or [''] * len(identifications)
    for (u, v), label in zip(identifications, labels):
        _require_symbols(p, [u, v], 'amalgamate')
        p = add_relator(p, concat(u, invert(v)), label)
    return p


def add_annotation(p: Presentation, description: str, base_words: Iterable) -> Presentation:
    base_words = tuple(base_words)
    if not base_words:
        raise PresentationError(f"annotation {description!r} needs at least one base word")
    _require_symbols(p, base_words, 'add_annotation')
    annotation = NormalClosureAnnotation(description, base_words)
    return replace(p, annotations=p.annotations + (annotation,))


def remove_annotations(p: Presentation) -> Presentation:
    return replace(p, annotations=())


def with_label(p: Presentation, label: str) -> Presentation:
    return replace(p, label=label)


def explicit_part(p: Presentation) -> Presentation:
    """The presentation with its annotations stripped."""
    return remove_annotations(p)


# ============================================================================
# GENERATOR MOVES
# ============================================================================

def _map_words(p, mapping):
    relators = []
    labels = []
    for label, relator in p.labelled_relators():
        core, _ = cyclic_reduce(substitute_word(relator, mapping))
        if core:
            relators.append(core)
            labels.append(label)
        else:
            logger.debug(f"{p.label}: relator {label or '?'} became trivial")
    annotations = tuple(
        NormalClosureAnnotation(
            a.aux_description,
            tuple(substitute_word(word, mapping) for word in a.base_words),
        )
        for a in p.annotations
    )
    return tuple(relators), tuple(labels), annotations


def substitute(p: Presentation, g: str, word: Word) -> Presentation:
    """
    Replace every occurrence of generator g by word in relators and annotations.

    The alphabet is unchanged; use tietze_eliminate to also drop g.
    """
    if g not in p.generators:
        raise PresentationError(f"{p.label}: {g!r} is not a generator")
    _require_symbols(p, [word], 'substitute')
    relators, labels, annotations = _map_words(p, {g: word})
    return replace(p, relators=relators, relator_labels=labels, annotations=annotations)


def add_generator(p: Presentation, g: str, word: Word, label: str = '') -> Presentation:
    """
    Add a new generator g together with the defining relator g word^-1.
    """
    if g in p.generators:
        raise PresentationError(f"{p.label}: generator {g!r} already exists")
    if not is_valid_generator_name(g):
        raise PresentationError(f"invalid generator name {g!r}")
    _require_symbols(p, [word], 'add_generator')
    extended = replace(p, generators=p.generators + (g,))
    return add_relator(extended, concat(Word.generator(g), invert(word)), label)


def tietze_eliminate(p: Presentation, g: str, defining: Word) -> Presentation:
    """
    Remove generator g using a relator that says g = defining.

    Args:
        p: Presentation
        g: Generator name to eliminate
        defining: Word over the remaining generators equal to g

    Returns:
        Presentation: g removed, occurrences substituted, defining relator dropped

    Raises:
        PresentationError: If defining mentions g or no relator defines g
    """
    if g not in p.generators:
        raise PresentationError(f"{p.label}: {g!r} is not a generator")
    if g in defining.symbols():
        raise PresentationError(f"{p.label}: defining word {defining} for {g!r} contains {g!r}")
    _require_symbols(p, [defining], 'tietze_eliminate')

    target = canonical_relator(concat(Word.generator(g), invert(defining)), p.generators)
    for index, relator in enumerate(p.relators):
        if canonical_relator(relator, p.generators) == target:
            break
    else:
        raise PresentationError(f"{p.label}: no relator defines {g} = {defining}")

    logger.debug(f"{p.label}: eliminating {g} := {defining} (relator {p.relator_labels[index] or index})")
    reduced = remove_relator(p, index)
    relators, labels, annotations = _map_words(reduced, {g: defining})
    return replace(
        reduced,
        generators=tuple(name for name in p.generators if name != g),
        relators=relators,
        relator_labels=labels,
        annotations=annotations,
    )


def rename_generators(p: Presentation, mapping: Mapping) -> Presentation:
    """
    Rename generators (old name -> new name) throughout.

    Raises:
        PresentationError: For unknown old names, invalid or colliding new names
    """
    for old, new in mapping.items():
        if old not in p.generators:
            raise PresentationError(f"{p.label}: cannot rename unknown generator {old!r}")
        if not is_valid_generator_name(new):
            raise PresentationError(f"invalid generator name {new!r}")
    generators = tuple(mapping.get(name, name) for name in p.generators)
    if len(set(generators)) != len(generators):
        raise PresentationError(f"{p.label}: renaming {dict(mapping)} produces duplicate generators")
    word_mapping = {old: Word.generator(new) for old, new in mapping.items()}
    relators, labels, annotations = _map_words(p, word_mapping)
    return replace(
        p,
        generators=generators,
        relators=relators,
        relator_labels=labels,
        annotations=annotations,
    )


# ============================================================================
# PRODUCTS
# ============================================================================

def free_product(p: Presentation, q: Presentation) -> tuple:
    """
    Free product of two presentations.

    Generator names of q that collide with p are suffixed (``a`` -> ``a_2``);
    relator labels are de-duplicated the same way.

    Returns:
        tuple: (Presentation, renames) where renames maps q's old names to new
    """
    taken = set(p.generators)
    renames = {}
    for name in q.generators:
        if name in taken:
            renames[name] = _fresh_label(taken | set(q.generators), name)
            taken.add(renames[name])
        else:
            taken.add(name)
    if renames:
        logger.info(f"free product {p.label} * {q.label}: renamed {renames}")
        q = rename_generators(q, renames)

    labels = list(p.relator_labels)
    used = set(label for label in labels if label)
    for label in q.relator_labels:
        if label:
            label = _fresh_label(used, label)
            used.add(label)
        labels.append(label)

    product = Presentation(
        label=f"{p.label}_{q.label}",
        generators=p.generators + q.generators,
        relators=p.relators + q.relators,
        relator_labels=tuple(labels),
        annotations=p.annotations + q.annotations,
    )
    return product, renames


# ============================================================================
# NORMALIZED COMPARISON
# ============================================================================

def normalized_relators(p: Presentation, alphabet: Sequence = None) -> set:
    """Set of canonical relators (cyclic reduction, inversion, dedup)."""
    order = p.generators if alphabet is None else alphabet
    return {canonical_relator(relator, order) for relator in p.relators}


def compare_relators(p: Presentation, q: Presentation) -> dict:
    """
    Compare relator sets of p and q up to normalization.

    Returns:
        dict: {
            'missing': canonical relators of q absent from p,
            'extra': canonical relators of p absent from q,
            'match': bool
        }
    """
    ours = normalized_relators(p, q.generators)
    theirs = normalized_relators(q, q.generators)
    missing = sorted(theirs - ours, key=str)
    extra = sorted(ours - theirs, key=str)
    return {'missing': missing, 'extra': extra, 'match': not missing and not extra}
