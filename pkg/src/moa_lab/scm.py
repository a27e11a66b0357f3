"""Single-constant multiplication as a shift-add/sub network.

A constant is recoded into canonical signed-digit (CSD) form: the signed
binary representation with no two adjacent nonzero digits, which has the
fewest nonzero digits of any signed-digit representation.  Each nonzero
digit becomes one shifted term; a k-term network needs k - 1 adders.
Zero constants recode to an empty network (the multiplier disappears) and
powers of two to a single term (a bare shift).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputDomainError

MAX_CONSTANT_BITS = 31

_INT64_MIN = -(1 << 63)
_INT64_MAX = (1 << 63) - 1


@dataclass(frozen=True)
class ScmTerm:
    shift: int
    sign: int

    def __post_init__(self):
        if self.shift < 0:
            raise InputDomainError(f"shift must be >= 0, got {self.shift}")
        if self.sign not in (1, -1):
            raise InputDomainError(f"sign must be +1 or -1, got {self.sign}")


@dataclass(frozen=True)
class ScmNetwork:
    constant: int
    terms: tuple[ScmTerm, ...]

    @property
    def adder_count(self) -> int:
        return max(0, len(self.terms) - 1)

    @property
    def is_eliminated(self) -> bool:
        return not self.terms


def csd_recode(constant: int) -> ScmNetwork:
    """Recode ``constant`` into its canonical signed-digit network.

    Scans from the least significant bit; a run ending in ``...11`` is
    replaced by ``+2^k`` carries and a ``-1`` digit, which is what keeps
    nonzero digits non-adjacent.  Works directly on negative constants.
    """
    if not -(1 << MAX_CONSTANT_BITS) < constant < (1 << MAX_CONSTANT_BITS):
        raise InputDomainError(
            f"|constant| must be < 2^{MAX_CONSTANT_BITS}, got {constant}"
        )
    terms = []
    remaining = constant
    shift = 0
    while remaining != 0:
        if remaining & 1:
            digit = 2 - (remaining & 3)  # +1 for ...01, -1 for ...11
            remaining -= digit
            terms.append(ScmTerm(shift, digit))
        remaining >>= 1
        shift += 1
    return ScmNetwork(constant, tuple(terms))


def eval_scm(net: ScmNetwork, x: int) -> int:
    """Multiply ``x`` by the network's constant using shifts and adds only."""
    acc = 0
    for term in net.terms:
        shifted = x << term.shift
        acc = acc + shifted if term.sign > 0 else acc - shifted
    if not _INT64_MIN <= acc <= _INT64_MAX:
        raise InputDomainError(
            f"product {net.constant} * {x} leaves the signed 64-bit range"
        )
    return acc
