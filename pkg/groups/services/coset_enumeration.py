"""
Todd-Coxeter coset enumeration

Two strategies over the same table machinery:
- HLT: scan-and-fill every relator at every live coset, in order, with an
  optional lookahead pass (scan without defining, then compact) when the
  coset limit is reached
- Felsch: fill the first undefined table entry, then process the deduction
  stack against all cyclic conjugates of the relators

Internally cosets are 0-based and column 2i / 2i+1 holds generator i and its
inverse, so the inverse column is ``col ^ 1``. Coincidences are merged with
a union-find whose representative is always the smaller index. Finished
tables are compacted and standardized, and exposed 1-based.
"""

import functools
import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from django.conf import settings

from groups.services.abelian import abelianization
from groups.services.errors import FpgError
from groups.services.presentation import PresentationError, explicit_part
from groups.services.words import cyclic_reduce

logger = logging.getLogger(__name__)

STRATEGIES = ('hlt', 'felsch')


class EnumerationError(FpgError):
    """Raised for invalid enumeration input or an invalid table lookup."""
    pass


class _CosetLimit(Exception):
    pass


# ============================================================================
# CONFIG AND RESULTS
# ============================================================================

@dataclass(frozen=True)
class EnumerationConfig:
    strategy: str = 'hlt'
    max_cosets: int = 1_000_000
    lookahead: bool = True

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise EnumerationError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if not isinstance(self.max_cosets, int) or self.max_cosets < 1:
            raise EnumerationError(f"max_cosets must be a positive integer, got {self.max_cosets!r}")

    @classmethod
    def from_settings(cls, **overrides):
        """Defaults from settings.FPG; keyword arguments that are not None win."""
        config = getattr(settings, 'FPG', {})
        values = {
            'strategy': config.get('STRATEGY', 'hlt'),
            'max_cosets': config.get('MAX_COSETS', 1_000_000),
            'lookahead': config.get('LOOKAHEAD', True),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True)
class CosetTable:
    """
    A complete, compacted and standardized coset table.

    rows[c - 1][col] is the 1-based image of coset c under column col, where
    column 2i is generator i and column 2i + 1 its inverse.
    """
    generators: tuple
    rows: tuple
    alive: tuple = ()

    def __post_init__(self):
        if not self.alive:
            object.__setattr__(self, 'alive', (True,) * len(self.rows))

    @property
    def num_cosets(self):
        return sum(1 for flag in self.alive if flag)

    def column(self, generator, sign=1):
        try:
            i = self.generators.index(generator)
        except ValueError:
            raise EnumerationError(f"{generator!r} is not a generator of this table")
        return 2 * i + (0 if sign == 1 else 1)

    def action(self, coset, generator, sign=1):
        self._check_coset(coset)
        image = self.rows[coset - 1][self.column(generator, sign)]
        if image is None:
            raise EnumerationError(f"coset {coset} has no image under {generator}^{sign}")
        return image

    def trace(self, start, word):
        """Image of coset start under word, letter by letter."""
        coset = start
        self._check_coset(coset)
        for letter in word.letters:
            coset = self.action(coset, letter.symbol, letter.sign)
        return coset

    def is_complete(self):
        return all(entry is not None for row in self.rows for entry in row)

    def dump(self):
        """Text dump: one ``coset<TAB>generator<TAB>image`` line per entry."""
        lines = []
        for c, row in enumerate(self.rows, start=1):
            for i, name in enumerate(self.generators):
                lines.append(f"{c}\t{name}\t{row[2 * i]}")
                lines.append(f"{c}\t{name}^-1\t{row[2 * i + 1]}")
        return '\n'.join(lines) + ('\n' if lines else '')

    def _check_coset(self, coset):
        if not isinstance(coset, int) or not 1 <= coset <= len(self.rows):
            raise EnumerationError(f"coset {coset!r} out of range 1..{len(self.rows)}")
        if not self.alive[coset - 1]:
            raise EnumerationError(f"coset {coset} is dead")


@dataclass(frozen=True)
class Completed:
    index: int
    table: CosetTable
    cosets_used: int
    strategy: str
    completed: bool = field(default=True, init=False)


@dataclass(frozen=True)
class Overflow:
    cosets_used: int
    strategy: str
    max_cosets: int
    completed: bool = field(default=False, init=False)


class Verdict(str, Enum):
    TRIVIAL = 'trivial'
    NONTRIVIAL_FINITE = 'nontrivial_finite'
    INCONCLUSIVE = 'inconclusive'


class Decision(str, Enum):
    TRUE = 'true'
    FALSE = 'false'
    INCONCLUSIVE = 'inconclusive'


@dataclass(frozen=True)
class TrivialityResult:
    verdict: Verdict
    order: int = None
    justification: tuple = ()

    @property
    def is_trivial(self):
        return self.verdict == Verdict.TRIVIAL


# ============================================================================
# ENUMERATOR
# ============================================================================

class CosetEnumerator:
    """
    Mutable enumeration workspace for one (presentation, subgroup, config).

    Not shared: every call to enumerate_cosets builds its own enumerator.
    """

    LOG_EVERY = 10_000

    def __init__(self, generators, relators, subgroup_gens, config):
        self.generators = tuple(generators)
        self.config = config
        self.ncols = 2 * len(self.generators)
        self._columns_of = {}
        for i, name in enumerate(self.generators):
            self._columns_of[(name, 1)] = 2 * i
            self._columns_of[(name, -1)] = 2 * i + 1

        self.relators = [self._to_columns(cyclic_reduce(r)[0]) for r in relators]
        self.relators = [r for r in self.relators if r]
        self.subgroup = [self._to_columns(w) for w in subgroup_gens]
        self.subgroup = [w for w in self.subgroup if w]

        self.table = [[None] * self.ncols]
        self.parent = [0]
        self.live = 1
        self.defined = 1
        self.coincidences = 0
        self.events = 0
        self.lookaheads = 0
        self.deductions = None

    def _to_columns(self, word):
        try:
            return [self._columns_of[(letter.symbol, letter.sign)] for letter in word.letters]
        except KeyError as e:
            raise EnumerationError(f"symbol {e.args[0][0]!r} is not a generator") from None

    # union-find

    def rep(self, k):
        parent = self.parent
        root = k
        while parent[root] != root:
            root = parent[root]
        while parent[k] != root:
            parent[k], k = root, parent[k]
        return root

    def _merge(self, k, l, queue):
        phi, psi = self.rep(k), self.rep(l)
        if phi != psi:
            mu, nu = min(phi, psi), max(phi, psi)
            self.parent[nu] = mu
            queue.append(nu)
            self.live -= 1
            self.coincidences += 1

    def coincidence(self, alpha, beta):
        table = self.table
        queue = deque()
        self._merge(alpha, beta, queue)
        self.events += 1
        while queue:
            gamma = queue.popleft()
            for col in range(self.ncols):
                delta = table[gamma][col]
                if delta is None:
                    continue
                table[delta][col ^ 1] = None
                mu, nu = self.rep(gamma), self.rep(delta)
                if table[mu][col] is not None:
                    self._merge(nu, table[mu][col], queue)
                elif table[nu][col ^ 1] is not None:
                    self._merge(mu, table[nu][col ^ 1], queue)
                else:
                    table[mu][col] = nu
                    table[nu][col ^ 1] = mu
                    if self.deductions is not None:
                        self.deductions.append((mu, col))

    # definitions and scans

    def define(self, alpha, col):
        if len(self.table) >= self.config.max_cosets:
            raise _CosetLimit()
        beta = len(self.table)
        self.table.append([None] * self.ncols)
        self.parent.append(beta)
        self.live += 1
        self.defined += 1
        self.table[alpha][col] = beta
        self.table[beta][col ^ 1] = alpha
        if self.deductions is not None:
            self.deductions.append((alpha, col))
        if self.defined % self.LOG_EVERY == 0:
            logger.debug(f"{self.defined} cosets defined, {self.live} live")

    def scan(self, alpha, word, fill=False):
        """
        Scan word at coset alpha; deduce a single gap, merge on mismatch.

        With fill=True, undefined positions are filled with new cosets until
        the scan completes (HLT scan-and-fill).
        """
        table = self.table
        f = b = alpha
        i, j = 0, len(word) - 1
        while True:
            while i <= j and table[f][word[i]] is not None:
                f = table[f][word[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and table[b][word[j] ^ 1] is not None:
                b = table[b][word[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if j == i:
                table[f][word[i]] = b
                table[b][word[i] ^ 1] = f
                self.events += 1
                if self.deductions is not None:
                    self.deductions.append((f, word[i]))
                return
            if not fill:
                return
            self.define(f, word[i])

    def _is_live(self, alpha):
        return self.parent[alpha] == alpha

    # HLT

    def _look_ahead(self):
        before = self.live
        for beta in range(len(self.table)):
            if not self._is_live(beta):
                continue
            for word in self.relators:
                self.scan(beta, word)
                if not self._is_live(beta):
                    break
        self.lookaheads += 1
        logger.info(f"lookahead pass {self.lookaheads}: {before} -> {self.live} live cosets")
        return self.live < before

    def _run_hlt(self):
        relators = sorted(self.relators, key=len)
        alpha = 0
        subgroup_done = False
        while True:
            try:
                if not subgroup_done:
                    for word in self.subgroup:
                        self.scan(0, word, fill=True)
                    subgroup_done = True
                while alpha < len(self.table):
                    if self._is_live(alpha):
                        for word in relators:
                            self.scan(alpha, word, fill=True)
                            if not self._is_live(alpha):
                                break
                        if self._is_live(alpha):
                            for col in range(self.ncols):
                                if self.table[alpha][col] is None:
                                    self.define(alpha, col)
                    alpha += 1
                return
            except _CosetLimit:
                if not self.config.lookahead or not self._look_ahead():
                    raise
                alpha = sum(1 for k in range(alpha) if self._is_live(k))
                self._compact()

    # Felsch

    def _conjugates_by_column(self):
        by_column = [[] for _ in range(self.ncols)]
        seen = set()
        for word in self.relators:
            inverse = [col ^ 1 for col in reversed(word)]
            for variant in (word, inverse):
                for k in range(len(variant)):
                    rotation = tuple(variant[k:] + variant[:k])
                    if rotation not in seen:
                        seen.add(rotation)
                        by_column[rotation[0]].append(list(rotation))
        return by_column

    def _process_deductions(self, by_column):
        table = self.table
        while self.deductions:
            alpha, col = self.deductions.pop()
            if not self._is_live(alpha):
                continue
            for word in by_column[col]:
                self.scan(alpha, word)
                if not self._is_live(alpha):
                    break
            if not self._is_live(alpha):
                continue
            beta = table[alpha][col]
            if beta is not None and self._is_live(beta):
                for word in by_column[col ^ 1]:
                    self.scan(beta, word)
                    if not self._is_live(beta):
                        break

    def _run_felsch(self):
        by_column = self._conjugates_by_column()
        self.deductions = []
        for word in self.subgroup:
            self.scan(0, word, fill=True)
            self._process_deductions(by_column)
        alpha = 0
        while alpha < len(self.table):
            if self._is_live(alpha):
                for col in range(self.ncols):
                    if not self._is_live(alpha):
                        break
                    if self.table[alpha][col] is None:
                        self.define(alpha, col)
                        self._process_deductions(by_column)
            alpha += 1
        self._process_deductions(by_column)

    # completion

    def _settled(self):
        """One closing pass: True when every relator and subgroup word already closes."""
        before = self.events
        for word in self.subgroup:
            self.scan(0, word)
        for beta in range(len(self.table)):
            if not self._is_live(beta):
                continue
            for word in self.relators:
                self.scan(beta, word)
                if not self._is_live(beta):
                    break
        if self.deductions:
            self.deductions.clear()
        return self.events == before

    def _is_complete(self):
        return all(
            entry is not None
            for beta, row in enumerate(self.table) if self._is_live(beta)
            for entry in row
        )

    def _compact(self):
        survivors = [k for k in range(len(self.table)) if self._is_live(k)]
        new_index = {old: new for new, old in enumerate(survivors)}
        self.table = [
            [None if entry is None else new_index[self.rep(entry)] for entry in self.table[old]]
            for old in survivors
        ]
        self.parent = list(range(len(survivors)))

    def _standardized(self):
        order = [0]
        position = {0: 0}
        k = 0
        while k < len(order):
            for entry in self.table[order[k]]:
                if entry not in position:
                    position[entry] = len(order)
                    order.append(entry)
            k += 1
        return tuple(
            tuple(position[entry] + 1 for entry in self.table[old])
            for old in order
        )

    def run(self):
        strategy = self.config.strategy
        try:
            while True:
                if strategy == 'felsch':
                    self._run_felsch()
                else:
                    self._run_hlt()
                if self._settled() and self._is_complete():
                    break
                logger.debug("table not closed after main pass; resuming")
        except _CosetLimit:
            logger.info(
                f"{strategy}: coset limit {self.config.max_cosets} reached "
                f"({self.defined} defined, {self.live} live)"
            )
            return Overflow(cosets_used=self.defined, strategy=strategy, max_cosets=self.config.max_cosets)

        self._compact()
        rows = self._standardized()
        table = CosetTable(generators=self.generators, rows=rows)
        logger.info(
            f"{strategy}: index {len(rows)} after {self.defined} definitions, "
            f"{self.coincidences} coincidences, {self.lookaheads} lookaheads"
        )
        return Completed(index=len(rows), table=table, cosets_used=self.defined, strategy=strategy)


# ============================================================================
# PUBLIC OPERATIONS
# ============================================================================

@functools.lru_cache(maxsize=32)
def _cached_enumeration(generators, relators, subgroup_gens, config):
    return CosetEnumerator(generators, relators, subgroup_gens, config).run()


def enumerate_cosets(p, subgroup_gens=(), config=None):
    """
    Enumerate the cosets of the subgroup generated by subgroup_gens.

    Annotations of p are ignored (explicit part only). Results are memoized
    per (generators, relators, subgroup, config).

    Args:
        p: Presentation
        subgroup_gens: Iterable of Words over p's generators
        config: EnumerationConfig (defaults from settings)

    Returns:
        Completed | Overflow
    """
    config = config or EnumerationConfig.from_settings()
    subgroup_gens = tuple(subgroup_gens)
    known = set(p.generators)
    for word in subgroup_gens:
        for symbol in word.symbols():
            if symbol not in known:
                raise EnumerationError(f"subgroup generator {word} uses unknown symbol {symbol!r}")
    logger.info(f"enumerating {p.label}: {len(p.generators)} generators, {len(p.relators)} relators, "
                f"{len(subgroup_gens)} subgroup generators, strategy {config.strategy}")
    return _cached_enumeration(p.generators, p.relators, subgroup_gens, config)


def clear_enumeration_cache():
    _cached_enumeration.cache_clear()


def trace(table: CosetTable, start: int, word) -> int:
    return table.trace(start, word)


def _infinite_reason(p):
    group = abelianization(explicit_part(p))
    if group.free_rank > 0:
        return f"abelianization {group} is infinite, so no enumeration over the trivial subgroup can complete"
    return None


def is_trivial(p, config=None) -> TrivialityResult:
    """
    Decide triviality of the explicit part of p by enumeration.

    Returns:
        TrivialityResult: TRIVIAL (index 1), NONTRIVIAL_FINITE (index n > 1)
            or INCONCLUSIVE (overflow, or infinite abelianization)
    """
    reason = _infinite_reason(p)
    if reason:
        logger.info(f"{p.label}: inconclusive, {reason}")
        return TrivialityResult(Verdict.INCONCLUSIVE, justification=(reason,))
    result = enumerate_cosets(p, (), config)
    if not result.completed:
        return TrivialityResult(
            Verdict.INCONCLUSIVE,
            justification=(f"enumeration overflowed after {result.cosets_used} cosets "
                           f"(limit {result.max_cosets})",),
        )
    if result.index == 1:
        return TrivialityResult(
            Verdict.TRIVIAL, order=1,
            justification=(f"{result.strategy} enumeration over the trivial subgroup completed with index 1",),
        )
    return TrivialityResult(
        Verdict.NONTRIVIAL_FINITE, order=result.index,
        justification=(f"enumeration completed with index {result.index}",),
    )


def is_trivial_with_annotations(p, config=None) -> TrivialityResult:
    """
    Triviality of the full annotated group from triviality of its explicit part.

    If the explicit part is trivial, every annotation base word is trivial,
    so each normal closure is trivial and so is every auxiliary generator;
    auxiliary relators are then redundant.

    Raises:
        PresentationError: If a base word uses a symbol outside the explicit alphabet
    """
    known = set(p.generators)
    for annotation in p.annotations:
        for word in annotation.base_words:
            unknown = [symbol for symbol in word.symbols() if symbol not in known]
            if unknown:
                raise PresentationError(
                    f"annotation {annotation.aux_description!r} base word {word} "
                    f"uses symbols outside the explicit alphabet: {unknown}"
                )

    explicit = is_trivial(explicit_part(p), config)
    if explicit.verdict != Verdict.TRIVIAL:
        return TrivialityResult(
            Verdict.INCONCLUSIVE,
            justification=explicit.justification + (
                f"explicit part is {explicit.verdict.value}; the annotated group is not determined",
            ),
        )
    lines = list(explicit.justification)
    lines.append("the explicit part is trivial, so every explicit word is trivial")
    for annotation in p.annotations:
        words = ', '.join(str(word) for word in annotation.base_words)
        lines.append(
            f"base words {words} are trivial, so their normal closure is trivial "
            f"and the auxiliary generators '{annotation.aux_description}' lying in it are trivial"
        )
    if p.annotations:
        lines.append("auxiliary relators become redundant; the annotated group is trivial")
    return TrivialityResult(Verdict.TRIVIAL, order=1, justification=tuple(lines))


def word_is_identity(p, word, config=None) -> Decision:
    """
    Decide whether word is the identity of the explicit part of p.

    Returns:
        Decision: TRUE/FALSE on a completed enumeration, INCONCLUSIVE otherwise
    """
    known = set(p.generators)
    for symbol in word.symbols():
        if symbol not in known:
            raise EnumerationError(f"word {word} uses unknown symbol {symbol!r}")
    if _infinite_reason(p):
        return Decision.INCONCLUSIVE
    result = enumerate_cosets(p, (), config)
    if not result.completed:
        return Decision.INCONCLUSIVE
    table = result.table
    fixes_all = all(table.trace(c, word) == c for c in range(1, table.num_cosets + 1))
    return Decision.TRUE if fixes_all else Decision.FALSE


