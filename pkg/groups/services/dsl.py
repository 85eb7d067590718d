"""
Text formats for presentations (.grp) and derivation scripts (.drv)

Presentation file:

    # comment
    group trefoil {
      gens: a, b;
      rels:
        aba: a b a = b a b,
        [x, a] = [x, b] = 1;
      annotate "auxiliary generators" normal_closure([x, b]);
    }

Derivation script:

    derive dbd in pi1_X_golden {
      start: d b d;
      use x_subst exp = -1 at 0 conj = d b d^-1;
      insert rel = db exp = +1 at 1;
      end: b d^2 b;
    }

Words are juxtaposed terms; ``^`` binds tighter than juxtaposition and
takes a signed integer; ``[u, v]`` is u v u^-1 v^-1; ``1`` is the empty
word. A relation ``u = v`` is stored as u v^-1; a chain ``u = v = w``
gives u w^-1 and v w^-1. Parsing uses a LALR grammar with a contextual
lexer, so keywords are only reserved where the grammar expects them.
"""

import functools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from django.conf import settings
from lark import Lark, Token, Transformer
from lark.exceptions import (
    LarkError,
    UnexpectedCharacters,
    UnexpectedEOF,
    UnexpectedInput,
    UnexpectedToken,
    VisitError,
)

from groups.services.derivation import (
    DerivationScript,
    InsertRelator,
    UseIdentity,
)
from groups.services.errors import FpgError
from groups.services.presentation import NormalClosureAnnotation, Presentation
from groups.services.words import (
    EMPTY_WORD,
    Word,
    commutator,
    concat,
    cyclic_reduce,
    invert,
)

logger = logging.getLogger(__name__)


GRAMMAR = r'''
presentation_file: "group" IDENT "{" gens_section rels_section annotation* "}"
gens_section: "gens" ":" ident_list? ";"
ident_list: IDENT ("," IDENT)*
rels_section: "rels" ":" relation_list? ";"
relation_list: relation ("," relation)*
relation: label? word ("=" word)*
label: IDENT ":"
annotation: "annotate" STRING "normal_closure" "(" word ("," word)* ")" ";"

derivation_file: "derive" IDENT "in" IDENT "{" "start" ":" word ";" step* "end" ":" word ";" "}"
step: "insert" "rel" "=" relator_ref "exp" "=" SIGNED_ONE "at" INT conjugator? ";"  -> insert_step
    | "use" IDENT "exp" "=" SIGNED_ONE "at" INT conjugator? ";"                     -> use_step
relator_ref: INT | IDENT
conjugator: "conj" "=" word

word_only: word

word: term+
term: atom ("^" EXPONENT)?
atom: IDENT                   -> generator
    | ONE                     -> identity
    | "(" word ")"            -> group
    | "[" word "," word "]"   -> bracket

IDENT: /[A-Za-z][A-Za-z0-9_]*/
ONE: "1"
INT: /\d+/
EXPONENT: /-?\d+/
SIGNED_ONE: /[+-]1/
STRING: /"(?:[^"\\\n]|\\.)*"/
COMMENT: /#[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
'''

START_SYMBOLS = ['presentation_file', 'derivation_file', 'word_only']


@dataclass(frozen=True)
class SourceSpan:
    """1-based position of the offending text."""
    line: int
    column: int
    length: int = 1

    def __str__(self):
        return f"{self.line}:{self.column}"


class ParseError(FpgError):
    """Raised when .grp/.drv text does not match the grammar."""

    def __init__(self, span, message, expected=(), source=None):
        self.span = span
        self.message = message
        self.expected = list(expected)
        self.source = source
        super().__init__(str(self))

    def __str__(self):
        where = f"{self.source}:{self.span}" if self.source else str(self.span)
        text = f"{where}: {self.message}"
        if self.expected:
            text += f" (expected {', '.join(self.expected)})"
        return text


class _Piece(NamedTuple):
    """A parsed word plus the token where it starts (for error spans)."""
    word: Word
    token: Token


class _Label(str):
    pass


def _span_of(token):
    line = getattr(token, 'line', None) or 1
    column = getattr(token, 'column', None) or 1
    return SourceSpan(line, column, max(len(str(token)), 1))


def _end_span(text):
    """Span of the last character of text (line 1, column 1 for empty text)."""
    stripped = text.rstrip('\n') or text
    if not stripped:
        return SourceSpan(1, 1, 1)
    lines = stripped.split('\n')
    return SourceSpan(len(lines), max(len(lines[-1]), 1), 1)


UNESCAPES = {'n': '\n', 'r': '\r', 't': '\t'}
ESCAPES = {'\\': '\\\\', '"': '\\"', '\n': '\\n', '\r': '\\r', '\t': '\\t'}


def _unescape(string_token):
    body = str(string_token)[1:-1]
    out = []
    chars = iter(body)
    for ch in chars:
        if ch == '\\':
            escaped = next(chars, '')
            out.append(UNESCAPES.get(escaped, escaped))
        else:
            out.append(ch)
    return ''.join(out)


def _escape(text):
    return ''.join(ESCAPES.get(ch, ch) for ch in text)


class _AstBuilder(Transformer):
    """Builds Words, Presentations and DerivationScripts during the LALR parse."""

    def __init__(self, max_word_length):
        super().__init__()
        self.max_word_length = max_word_length

    def _checked(self, word, token):
        if len(word) > self.max_word_length:
            raise ParseError(
                _span_of(token),
                f"word expands to {len(word)} letters (limit {self.max_word_length})",
            )
        return _Piece(word, token)

    # words

    def generator(self, children):
        token = children[0]
        return _Piece(Word.generator(str(token)), token)

    def identity(self, children):
        return _Piece(EMPTY_WORD, children[0])

    def group(self, children):
        return children[0]

    def bracket(self, children):
        left, right = children
        return self._checked(commutator(left.word, right.word), left.token)

    def term(self, children):
        piece = children[0]
        if len(children) == 1:
            return piece
        exponent_token = children[1]
        exponent = int(exponent_token)
        if len(piece.word) * abs(exponent) > self.max_word_length:
            raise ParseError(
                _span_of(exponent_token),
                f"exponent {exponent} expands the word beyond {self.max_word_length} letters",
            )
        return self._checked(piece.word ** exponent, piece.token)

    def word(self, children):
        return self._checked(concat(*(piece.word for piece in children)), children[0].token)

    def word_only(self, children):
        return children[0].word

    # presentations

    def ident_list(self, children):
        return [str(token) for token in children]

    def gens_section(self, children):
        return tuple(children[0]) if children else ()

    def label(self, children):
        return _Label(children[0])

    def relation(self, children):
        label = ''
        if children and isinstance(children[0], _Label):
            label, children = str(children[0]), children[1:]
        words = [piece.word for piece in children]
        if len(words) == 1:
            pairs = [(label, words[0])]
        else:
            last = invert(words[-1])
            pairs = [
                (label if len(words) == 2 or not label else f"{label}_{i}", concat(word, last))
                for i, word in enumerate(words[:-1], start=1)
            ]
        relators = []
        for name, word in pairs:
            core, _ = cyclic_reduce(word)
            if core:
                relators.append((name, core))
            else:
                logger.debug(f"dropping trivial relation {name or str(word)}")
        return relators

    def relation_list(self, children):
        return [pair for relation in children for pair in relation]

    def rels_section(self, children):
        return children[0] if children else []

    def annotation(self, children):
        description = _unescape(children[0])
        return NormalClosureAnnotation(description, tuple(piece.word for piece in children[1:]))

    def presentation_file(self, children):
        label, generators, relators, *annotations = children
        return Presentation(
            label=str(label),
            generators=generators,
            relators=tuple(word for _, word in relators),
            relator_labels=tuple(name for name, _ in relators),
            annotations=tuple(annotations),
        )

    # derivations

    def relator_ref(self, children):
        token = children[0]
        return int(token) if token.type == 'INT' else str(token)

    def conjugator(self, children):
        return children[0].word

    def insert_step(self, children):
        ref, sign, position, *rest = children
        return InsertRelator(
            relator_ref=ref,
            exponent=int(sign),
            position=int(position),
            conjugator=rest[0] if rest else EMPTY_WORD,
        )

    def use_step(self, children):
        name, sign, position, *rest = children
        return UseIdentity(
            identity_name=str(name),
            exponent=int(sign),
            position=int(position),
            conjugator=rest[0] if rest else EMPTY_WORD,
        )

    def derivation_file(self, children):
        name, presentation_label, start, *steps, end = children
        return DerivationScript(
            name=str(name),
            presentation_label=str(presentation_label),
            start=start.word,
            steps=tuple(steps),
            end=end.word,
        )


@functools.lru_cache(maxsize=4)
def _parser(max_word_length):
    return Lark(
        GRAMMAR,
        parser='lalr',
        lexer='contextual',
        start=START_SYMBOLS,
        transformer=_AstBuilder(max_word_length),
    )


def _describe_expected(parser, names):
    described = []
    for name in sorted(names or ()):
        try:
            pattern = parser.get_terminal(name).pattern
        except KeyError:
            described.append(name)
            continue
        if pattern.type == 'str':
            described.append(f"'{pattern.value}'")
        else:
            described.append(name.lower())
    return described


def _parse(text, start, source=None):
    max_word_length = getattr(settings, 'FPG', {}).get('MAX_WORD_LENGTH', 100_000)
    parser = _parser(max_word_length)
    try:
        return parser.parse(text, start=start)
    except ParseError as e:
        e.source = source
        raise
    except VisitError as e:
        if isinstance(e.orig_exc, ParseError):
            e.orig_exc.source = source
            raise e.orig_exc
        raise ParseError(_end_span(text), str(e.orig_exc), source=source) from e
    except UnexpectedEOF as e:
        raise ParseError(
            _end_span(text), 'unexpected end of input',
            _describe_expected(parser, e.expected), source=source,
        ) from None
    except UnexpectedCharacters as e:
        char = text[e.pos_in_stream] if 0 <= e.pos_in_stream < len(text) else ''
        raise ParseError(
            SourceSpan(e.line, e.column, 1), f"unexpected character {char!r}",
            _describe_expected(parser, e.allowed), source=source,
        ) from None
    except UnexpectedToken as e:
        if e.token.type == '$END':
            span = _end_span(text)
            message = 'unexpected end of input'
        else:
            span = _span_of(e.token)
            message = f"unexpected {str(e.token)!r}"
        raise ParseError(span, message, _describe_expected(parser, e.expected), source=source) from None
    except UnexpectedInput as e:
        raise ParseError(
            SourceSpan(getattr(e, 'line', 1) or 1, getattr(e, 'column', 1) or 1, 1),
            str(e), source=source,
        ) from None
    except (LarkError, RecursionError) as e:
        raise ParseError(_end_span(text), f"cannot parse input: {e}", source=source) from None


def parse_presentation(text: str, source=None) -> Presentation:
    """
    Parse .grp text.

    Raises:
        ParseError: With the span of the first offending token
    """
    return _parse(text, 'presentation_file', source)


def parse_derivation(text: str, source=None) -> DerivationScript:
    """
    Parse .drv text.

    Raises:
        ParseError: With the span of the first offending token
    """
    return _parse(text, 'derivation_file', source)


def parse_word(text: str) -> Word:
    """Parse a bare word such as ``a b^2 [x, b]``."""
    return _parse(text, 'word_only')


# ============================================================================
# SERIALIZATION
# ============================================================================

def serialize_presentation(p: Presentation) -> str:
    """
    Canonical .grp text; parse_presentation(serialize_presentation(p)) == p.
    """
    lines = [f"group {p.label} {{", f"  gens: {', '.join(p.generators)};"]
    relations = [
        f"{label}: {relator} = 1" if label else f"{relator} = 1"
        for label, relator in p.labelled_relators()
    ]
    if relations:
        lines.append("  rels:")
        lines.append(',\n'.join(f"    {relation}" for relation in relations) + ';')
    else:
        lines.append("  rels: ;")
    for annotation in p.annotations:
        words = ', '.join(str(word) for word in annotation.base_words)
        lines.append(f'  annotate "{_escape(annotation.aux_description)}" normal_closure({words});')
    lines.append("}")
    return '\n'.join(lines) + '\n'


def serialize_derivation(script: DerivationScript) -> str:
    lines = [
        f"derive {script.name} in {script.presentation_label} {{",
        f"  start: {script.start};",
    ]
    for step in script.steps:
        sign = '+1' if step.exponent == 1 else '-1'
        if isinstance(step, InsertRelator):
            head = f"insert rel = {step.relator_ref}"
        else:
            head = f"use {step.identity_name}"
        tail = f" conj = {step.conjugator}" if step.conjugator else ''
        lines.append(f"  {head} exp = {sign} at {step.position}{tail};")
    lines.append(f"  end: {script.end};")
    lines.append("}")
    return '\n'.join(lines) + '\n'


# ============================================================================
# FILES
# ============================================================================

def load_presentation(path) -> Presentation:
    """
    Read and parse a .grp file.

    Raises:
        OSError: If the file cannot be read
        ParseError: If the text is malformed
    """
    path = Path(path)
    return parse_presentation(path.read_text(encoding='utf-8'), source=str(path))


def load_script(path) -> DerivationScript:
    path = Path(path)
    return parse_derivation(path.read_text(encoding='utf-8'), source=str(path))


def load_scripts(directory) -> list:
    """All .drv scripts of a directory, in file-name order."""
    return [load_script(path) for path in sorted(Path(directory).glob('*.drv'))]
