"""
Free-group word algebra

Words are immutable, always freely reduced sequences of signed letters.
Every other service speaks in Words:
- Relators and annotation base words of presentations
- Subgroup generators handed to coset enumeration
- Start/end words and conjugators of derivation scripts

Conventions used throughout the toolkit:
- commutator(u, v) = u v u^-1 v^-1
- conjugate(w, u)  = u w u^-1
"""

import logging
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from groups.services.errors import FpgError

logger = logging.getLogger(__name__)

GENERATOR_NAME_RE = re.compile(r'^[A-Za-z][A-Za-z0-9_]*$')


class WordError(FpgError):
    """Raised when a word mentions a symbol outside the expected alphabet."""
    pass


class GeneratorSymbol(NamedTuple):
    """A named generator; id is its position in the owning alphabet."""
    name: str
    id: int


class Letter(NamedTuple):
    """One signed occurrence of a generator (sign is +1 or -1)."""
    symbol: str
    sign: int

    def inverse(self):
        return Letter(self.symbol, -self.sign)

    def __str__(self):
        return self.symbol if self.sign == 1 else f"{self.symbol}^-1"


def _free_reduce(letters):
    stack = []
    for letter in letters:
        if letter.sign not in (1, -1):
            raise WordError(f"Letter {letter.symbol!r} has sign {letter.sign}; expected +1 or -1")
        if stack and stack[-1].symbol == letter.symbol and stack[-1].sign == -letter.sign:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    """
    A freely reduced word in named generators.

    The constructor reduces its input, so a Word can never hold an adjacent
    pair x x^-1. Supports ``u * v`` (concatenation), ``w ** n`` and
    ``w.inverse()``.
    """
    letters: tuple = ()

    def __post_init__(self):
        letters = tuple(
            letter if isinstance(letter, Letter) else Letter(*letter)
            for letter in self.letters
        )
        object.__setattr__(self, 'letters', _free_reduce(letters))

    @classmethod
    def generator(cls, name, sign=1):
        return cls((Letter(name, sign),))

    @classmethod
    def generators(cls, *names):
        """``a, b = Word.generators('a', 'b')``"""
        return tuple(cls.generator(name) for name in names)

    @classmethod
    def from_syllables(cls, syllables):
        """
        Build a word from (name, exponent) pairs, e.g. [('a', 1), ('b', 2)].
        """
        letters = []
        for name, exponent in syllables:
            sign = 1 if exponent > 0 else -1
            letters.extend([Letter(name, sign)] * abs(exponent))
        return cls(tuple(letters))

    @property
    def identity(self):
        return not self.letters

    def symbols(self):
        """Generator names occurring in the word, in first-occurrence order."""
        return list(dict.fromkeys(letter.symbol for letter in self.letters))

    def syllables(self):
        """Run-length form: list of (name, exponent) with nonzero exponents."""
        runs = []
        for letter in self.letters:
            if runs and runs[-1][0] == letter.symbol:
                runs[-1][1] += letter.sign
            else:
                runs.append([letter.symbol, letter.sign])
        return [(name, exponent) for name, exponent in runs]

    def inverse(self):
        return invert(self)

    def __mul__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return concat(self, other)

    def __pow__(self, exponent):
        if exponent < 0:
            return invert(self) ** -exponent
        return Word(self.letters * exponent)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.letters[item])
        return self.letters[item]

    def __bool__(self):
        return bool(self.letters)

    def __str__(self):
        if not self.letters:
            return '1'
        parts = []
        for name, exponent in self.syllables():
            parts.append(name if exponent == 1 else f"{name}^{exponent}")
        return ' '.join(parts)

    def __repr__(self):
        return f"Word('{self}')"


EMPTY_WORD = Word()


def reduce(letters: Iterable) -> Word:
    """
    Freely reduce a raw letter sequence.

    Args:
        letters: Iterable of Letter (or (symbol, sign) pairs)

    Returns:
        Word: The freely reduced word
    """
    return Word(tuple(letters))


def invert(w: Word) -> Word:
    return Word(tuple(letter.inverse() for letter in reversed(w.letters)))


def concat(*words: Word) -> Word:
    letters = []
    for word in words:
        letters.extend(word.letters)
    return Word(tuple(letters))


def conjugate(w: Word, u: Word) -> Word:
    """Return u w u^-1."""
    return concat(u, w, invert(u))


def commutator(u: Word, v: Word) -> Word:
    """Return [u, v] = u v u^-1 v^-1."""
    return concat(u, v, invert(u), invert(v))


def cyclic_reduce(w: Word) -> tuple:
    """
    Split w as conjugator * core * conjugator^-1 with core cyclically reduced.

    Returns:
        tuple: (core, conjugator)
    """
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i].symbol == letters[j].symbol and letters[i].sign == -letters[j].sign:
        i += 1
        j -= 1
    return Word(letters[i:j + 1]), Word(letters[:i])


def exponent_vector(w: Word, alphabet: Sequence) -> list:
    """
    Signed occurrence count of every alphabet generator in w.

    Args:
        w: The word
        alphabet: Ordered generator names (or GeneratorSymbols)

    Returns:
        list[int]: One entry per alphabet position

    Raises:
        WordError: If w uses a symbol outside the alphabet
    """
    names = [getattr(symbol, 'name', symbol) for symbol in alphabet]
    position = {name: i for i, name in enumerate(names)}
    vector = [0] * len(names)
    for letter in w.letters:
        if letter.symbol not in position:
            raise WordError(f"Symbol {letter.symbol!r} is not in the alphabet {names}")
        vector[position[letter.symbol]] += letter.sign
    return vector


def cyclic_rotations(w: Word) -> list:
    """All cyclic rotations of a cyclically reduced word (w itself first)."""
    letters = w.letters
    return [Word(letters[i:] + letters[:i]) for i in range(max(len(letters), 1))]


def substitute(w: Word, mapping: Mapping) -> Word:
    """
    Replace every generator named in mapping by its image word.

    Occurrences with sign -1 are replaced by the inverse image.
    """
    letters = []
    for letter in w.letters:
        image = mapping.get(letter.symbol)
        if image is None:
            letters.append(letter)
        elif letter.sign == 1:
            letters.extend(image.letters)
        else:
            letters.extend(invert(image).letters)
    return Word(tuple(letters))


def _letter_key(alphabet_order):
    def key(letter):
        position = alphabet_order.get(letter.symbol)
        if position is None:
            return (1, letter.symbol, 0 if letter.sign == 1 else 1)
        return (0, position, 0 if letter.sign == 1 else 1)
    return key


def canonical_relator(w: Word, alphabet: Sequence = ()) -> Word:
    """
    Canonical representative of the relator class of w.

    Cyclically reduces w, then picks the least cyclic rotation of w or w^-1.
    Letters compare by alphabet position, then sign (positive first);
    symbols outside the alphabet sort after it by name.
    """
    core, _ = cyclic_reduce(w)
    if not core:
        return core
    order = {getattr(symbol, 'name', symbol): i for i, symbol in enumerate(alphabet)}
    key = _letter_key(order)
    candidates = cyclic_rotations(core) + cyclic_rotations(invert(core))
    return min(candidates, key=lambda candidate: [key(letter) for letter in candidate.letters])


def is_valid_generator_name(name: str) -> bool:
    return bool(GENERATOR_NAME_RE.match(name or ''))
