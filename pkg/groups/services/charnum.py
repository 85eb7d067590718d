"""
Characteristic numbers of closed 4-manifolds

Bookkeeping with (e, sigma) pairs: Euler characteristic and signature.
Derived numbers:
- c1^2  = 2e + 3 sigma
- chi_h = (e + sigma) / 4, defined only when 4 divides e + sigma

Building blocks are hard-coded: tori and products with a circle have
e = sigma = 0; CP^2 is (3, 1), its reverse (3, -1), S^4 is (2, 0).
"""

import logging
from dataclasses import dataclass, field

from groups.services.errors import FpgError

logger = logging.getLogger(__name__)


class CharNumberError(FpgError):
    """Raised for chi_h of a non-divisible pair or an invalid Freedman type."""
    pass


@dataclass(frozen=True)
class CharNumbers:
    e: int
    sigma: int

    def __str__(self):
        return f"(e={self.e}, sigma={self.sigma})"


@dataclass(frozen=True)
class HomeoType:
    """m copies of CP^2 and n of its reverse, connected-summed."""
    m: int
    n: int

    def char_numbers(self):
        return CharNumbers(e=2 + self.m + self.n, sigma=self.m - self.n)

    def __str__(self):
        return f"{self.m}CP2 # {self.n}CP2bar"


T4 = CharNumbers(0, 0)
MK_S1 = CharNumbers(0, 0)
S4 = CharNumbers(2, 0)
CP2 = CharNumbers(3, 1)
CP2_BAR = CharNumbers(3, -1)


def c1_sq(c: CharNumbers) -> int:
    return 2 * c.e + 3 * c.sigma


def chi_h(c: CharNumbers) -> int:
    """
    Holomorphic Euler characteristic (e + sigma) / 4.

    Raises:
        CharNumberError: If e + sigma is not divisible by 4
    """
    total = c.e + c.sigma
    if total % 4:
        raise CharNumberError(f"chi_h undefined for {c}: e + sigma = {total} is not divisible by 4")
    return total // 4


def fiber_sum(a: CharNumbers, b: CharNumbers, genus: int) -> CharNumbers:
    """
    Generalized fiber sum along surfaces of the given genus.

    e drops by twice the Euler characteristic of the surface; signatures add.
    Genus 0 is accepted arithmetically only.
    """
    if genus < 0:
        raise CharNumberError(f"genus must be nonnegative, got {genus}")
    return CharNumbers(e=a.e + b.e - 2 * (2 - 2 * genus), sigma=a.sigma + b.sigma)


def blow_up(c: CharNumbers, k: int = 1) -> CharNumbers:
    if k < 1:
        raise CharNumberError(f"blow_up needs k >= 1, got {k}")
    return CharNumbers(e=c.e + k, sigma=c.sigma - k)


def connected_sum(a: CharNumbers, b: CharNumbers) -> CharNumbers:
    return CharNumbers(e=a.e + b.e - 2, sigma=a.sigma + b.sigma)


def freedman_type(c: CharNumbers) -> HomeoType:
    """
    (m, n) with e = 2 + m + n and sigma = m - n.

    Arithmetic only: simple connectivity and an odd intersection form are
    the caller's claim.

    Raises:
        CharNumberError: If the pair is not of the form m CP^2 # n CP2bar
    """
    plus, minus = c.e + c.sigma - 2, c.e - c.sigma - 2
    if plus < 0 or minus < 0 or plus % 2 or minus % 2:
        raise CharNumberError(f"{c} is not of type mCP2 # nCP2bar")
    return HomeoType(m=plus // 2, n=minus // 2)


def chi_h_or_none(c: CharNumbers):
    """chi_h, or None where e + sigma is not divisible by 4."""
    try:
        return chi_h(c)
    except CharNumberError:
        return None


# ============================================================================
# TABLE
# ============================================================================

@dataclass(frozen=True)
class CharRow:
    name: str
    numbers: CharNumbers
    expected: dict = field(default_factory=dict)
    notes: str = ''

    def observed(self):
        return {
            'e': self.numbers.e,
            'sigma': self.numbers.sigma,
            'c1_sq': c1_sq(self.numbers),
            'chi_h': chi_h_or_none(self.numbers),
        }

    @property
    def mismatches(self):
        observed = self.observed()
        return [
            f"{self.name}.{key}: expected {value}, got {observed.get(key)}"
            for key, value in self.expected.items()
            if observed.get(key) != value
        ]

    @property
    def ok(self):
        return not self.mismatches


@dataclass(frozen=True)
class CharTable:
    rows: tuple
    checks: tuple    # (description, ok) pairs beyond the per-row expectations
    homeo_types: dict

    @property
    def mismatches(self):
        found = [m for row in self.rows for m in row.mismatches]
        found.extend(description for description, ok in self.checks if not ok)
        return found

    @property
    def ok(self):
        return not self.mismatches


def homeo_type_checks(name, numbers: CharNumbers, expected: HomeoType):
    """
    Freedman type of numbers against expected, plus the c1^2 and chi_h identities.

    Returns:
        tuple: (HomeoType or None, list of (description, ok) pairs)
    """
    try:
        found = freedman_type(numbers)
    except CharNumberError as e:
        return None, [(f"{name}: {e}", False)]
    holomorphic = chi_h_or_none(numbers)
    return found, [
        (f"{name} is homeomorphic to {expected}", found == expected),
        (f"{name}: c1^2 = 5m - n + 4 for {found}", c1_sq(numbers) == 5 * found.m - found.n + 4),
        (
            f"{name}: chi_h = (m + 1) / 2 for {found}",
            holomorphic is not None and (found.m + 1) % 2 == 0 and holomorphic == (found.m + 1) // 2,
        ),
    ]


def fiber_sum_checks(name, a: CharNumbers, b: CharNumbers, genus: int):
    """c1^2 and chi_h of a fiber sum against their closed forms."""
    summed = fiber_sum(a, b, genus)
    terms = [chi_h_or_none(c) for c in (summed, a, b)]
    return [
        (f"{name}: c1^2 adds with 8(g - 1)", c1_sq(summed) == c1_sq(a) + c1_sq(b) + 8 * (genus - 1)),
        (
            f"{name}: chi_h adds with g - 1",
            None not in terms and terms[0] == terms[1] + terms[2] + (genus - 1),
        ),
    ]


def reproduce_char_table() -> CharTable:
    """
    Rebuild the characteristic numbers of X and U from their building blocks.

    Y_K is two copies of M_K x S^1 summed along tori; X_K is two copies of
    Y_K summed along genus-2 surfaces; Y and Q are twice-blown-up T^4 and
    M_K x S^1. X = X_K # Y and U = Y_K # Q along genus 2.
    """
    y_k = fiber_sum(MK_S1, MK_S1, 1)
    x_k = fiber_sum(y_k, y_k, 2)
    y = blow_up(T4, 2)
    q = blow_up(MK_S1, 2)
    x = fiber_sum(x_k, y, 2)
    u = fiber_sum(y_k, q, 2)

    rows = (
        CharRow('T4', T4, {'e': 0, 'sigma': 0}),
        CharRow('MK_x_S1', MK_S1, {'e': 0, 'sigma': 0}),
        CharRow('Y_K', y_k, {'e': 0, 'sigma': 0, 'c1_sq': 0, 'chi_h': 0}),
        CharRow('X_K', x_k, {'e': 4, 'sigma': 0, 'c1_sq': 8, 'chi_h': 1}),
        CharRow('Y', y, {'e': 2, 'sigma': -2, 'c1_sq': -2, 'chi_h': 0}, 'T4 blown up twice'),
        CharRow('Q', q, {'e': 2, 'sigma': -2, 'c1_sq': -2, 'chi_h': 0}, 'MK x S1 blown up twice'),
        CharRow('X', x, {'e': 10, 'sigma': -2, 'c1_sq': 14, 'chi_h': 2}),
        CharRow('U', u, {'e': 6, 'sigma': -2, 'c1_sq': 6, 'chi_h': 1}),
    )

    homeo_types = {}
    checks = []
    for name, numbers, expected in (('X', x, HomeoType(3, 5)), ('U', u, HomeoType(1, 3))):
        found, found_checks = homeo_type_checks(name, numbers, expected)
        if found is not None:
            homeo_types[name] = found
        checks.extend(found_checks)

    for name, a, b, genus in (('Y_K', MK_S1, MK_S1, 1), ('X_K', y_k, y_k, 2),
                              ('X', x_k, y, 2), ('U', y_k, q, 2)):
        checks.extend(fiber_sum_checks(name, a, b, genus))

    standard = CP2
    for _ in range(2):
        standard = connected_sum(standard, CP2)
    for _ in range(5):
        standard = connected_sum(standard, CP2_BAR)
    checks.append(("3CP2 # 5CP2bar has the characteristic numbers of X", standard == x))

    table = CharTable(rows=rows, checks=tuple(checks), homeo_types=homeo_types)
    for mismatch in table.mismatches:
        logger.warning(f"characteristic numbers: {mismatch}")
    return table
