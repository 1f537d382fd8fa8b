import logging
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np

from app.errors import ParameterError
from app.schemas.barchain_schema import (
    BarChainRecord, BarChainReport, BarSelftestReport, BarTermRecord
)
from app.schemas.presentation_schema import Presentation
from app.services.words_service import (
    IDENTITY, Word, format_word, generator_letters, normal_form, parse_word, word_length
)

logger = logging.getLogger(__name__)

Simplex = Tuple[Word, ...]


@dataclass(frozen=True)
class BarChain:
    """Integer chain on (n+1)-tuples of group elements; degree -1 is the augmentation."""
    degree: int
    terms: Tuple[Tuple[Simplex, int], ...] = ()

    @classmethod
    def from_mapping(cls, degree: int, mapping: Mapping[Simplex, int]) -> "BarChain":
        return cls(degree, tuple(sorted((s, c) for s, c in mapping.items() if c != 0)))

    def as_dict(self) -> Dict[Simplex, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _combine(self, other: "BarChain", sign: int) -> "BarChain":
        if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
            raise ParameterError(f"Cannot add chains of degrees {self.degree} and {other.degree}")
        out = self.as_dict()
        for s, c in other.terms:
            out[s] = out.get(s, 0) + sign * c
        return BarChain.from_mapping(other.degree if self.is_zero() else self.degree, out)

    def __add__(self, other: "BarChain") -> "BarChain":
        return self._combine(other, 1)

    def __sub__(self, other: "BarChain") -> "BarChain":
        return self._combine(other, -1)

    def __neg__(self) -> "BarChain":
        return BarChain(self.degree, tuple((s, -c) for s, c in self.terms))


def bar_chain(p: Presentation, terms: Iterable[Tuple[Iterable[Word], int]]) -> BarChain:
    """Chain from (tuple of words, coefficient) pairs; words are brought to normal form."""
    out: Dict[Simplex, int] = {}
    degree = None
    for entries, coeff in terms:
        simplex = tuple(normal_form(p, w) for w in entries)
        if degree is None:
            degree = len(simplex) - 1
        elif len(simplex) - 1 != degree:
            raise ParameterError("All tuples in a bar chain need the same length")
        out[simplex] = out.get(simplex, 0) + coeff
    return BarChain.from_mapping(0 if degree is None else degree, out)


def bar_boundary(c: BarChain) -> BarChain:
    """Alternating sum of face deletions; degree 0 maps to the augmentation."""
    if c.degree < 0:
        raise ParameterError("The augmentation has no boundary")
    out: Dict[Simplex, int] = {}
    for simplex, coeff in c.terms:
        for i in range(len(simplex)):
            face = simplex[:i] + simplex[i + 1:]
            out[face] = out.get(face, 0) + (-1) ** i * coeff
    return BarChain.from_mapping(c.degree - 1, out)


def cone(c: BarChain) -> BarChain:
    return BarChain.from_mapping(c.degree + 1, {(IDENTITY,) + s: coeff for s, coeff in c.terms})


def bar_norm(p: Presentation, c: BarChain, k: int) -> int:
    """sum |coeff| * (1 + sum of entry lengths)^k, in exact integers."""
    if k < 0:
        raise ParameterError("Norm exponent must be nonnegative")
    lengths: Dict[Word, int] = {}
    total = 0
    for s, coeff in c.terms:
        size = 1
        for w in s:
            if w not in lengths:
                lengths[w] = word_length(p, w)
            size += lengths[w]
        total += abs(coeff) * size ** k
    return total


# ---------------------------------------------------------------------------
# Text form and records
# ---------------------------------------------------------------------------

_TERM = re.compile(r"([+-]?)\s*(\d*)\s*\[([^\]]*)\]")


def parse_bar_chain(p: Presentation, text: str) -> BarChain:
    """Read chains written like ``[a,ab] - 2[b,e] + [ab,a]``."""
    terms = []
    pos = 0
    for m in _TERM.finditer(text):
        if text[pos:m.start()].strip():
            raise ParameterError(f"Unreadable chain text near {text[pos:m.start()]!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = int(m.group(2)) if m.group(2) else 1
        entries = [parse_word(p, part.strip()) for part in m.group(3).split(",")] if m.group(3).strip() else []
        terms.append((entries, sign * coeff))
        pos = m.end()
    if text[pos:].strip() or not terms:
        raise ParameterError(f"Unreadable chain text {text!r}")
    return bar_chain(p, terms)


def chain_record(p: Presentation, c: BarChain) -> BarChainRecord:
    return BarChainRecord(
        degree=c.degree,
        terms=[BarTermRecord(entries=[format_word(p, w) for w in s], coeff=coeff) for s, coeff in c.terms],
    )


def analyze_chain(p: Presentation, c: BarChain, k_max: int = 3) -> BarChainReport:
    b = bar_boundary(c) if c.degree >= 0 else None
    coned = cone(c)
    is_cycle = b is not None and b.is_zero()
    homotopy = b is not None and (bar_boundary(coned) + cone(b)) == c
    return BarChainReport(
        chain=chain_record(p, c), boundary=chain_record(p, b) if b is not None else None,
        cone=chain_record(p, coned), is_cycle=is_cycle,
        cone_fills=bar_boundary(coned) == c,
        homotopy_identity=homotopy,
        norms={k: bar_norm(p, c, k) for k in range(k_max + 1)},
        cone_norms={k: bar_norm(p, coned, k) for k in range(k_max + 1)},
    )


# ---------------------------------------------------------------------------
# Randomised self-test of the cone identities
# ---------------------------------------------------------------------------

def _random_element(p: Presentation, rng: np.random.Generator, max_len: int) -> Word:
    letters = generator_letters(p.rank)
    n = int(rng.integers(0, max_len + 1))
    return normal_form(p, tuple(letters[int(i)] for i in rng.integers(0, len(letters), size=n)))


def random_bar_chain(p: Presentation, degree: int, rng: np.random.Generator, max_terms: int = 3,
                     max_len: int = 2, max_coeff: int = 3) -> BarChain:
    out: Dict[Simplex, int] = {}
    for _ in range(int(rng.integers(1, max_terms + 1))):
        simplex = tuple(_random_element(p, rng, max_len) for _ in range(degree + 1))
        coeff = int(rng.integers(1, max_coeff + 1)) * (1 if rng.integers(0, 2) else -1)
        out[simplex] = out.get(simplex, 0) + coeff
    return BarChain.from_mapping(degree, out)


def bar_selftest(p: Presentation, samples: int = 1000, seed: int = 0, k_max: int = 3) -> BarSelftestReport:
    """Seeded cycles and non-cycles of degrees 1..3 checked against the cone identities.

    Cycles are boundaries of random chains one degree up; for them the cone must fill
    exactly and keep every norm. Non-cycles must satisfy d(cone c) + cone(d c) = c.
    """
    rng = np.random.default_rng(seed)
    report = BarSelftestReport(samples=samples, seed=seed)

    def fail(message: str):
        if len(report.failures) < 20:
            report.failures.append(message)
        report.passed = False

    while report.cycles_checked < samples:
        degree = int(rng.integers(1, 4))
        top = random_bar_chain(p, degree + 1, rng)
        b = bar_boundary(top)
        report.boundary_squared_checked += 1
        if not bar_boundary(b).is_zero():
            fail(f"boundary squared nonzero on sample {report.boundary_squared_checked}")
        report.cycles_checked += 1
        coned = cone(b)
        if bar_boundary(coned) != b:
            fail(f"cone does not fill cycle {report.cycles_checked} (degree {degree})")
        for k in range(k_max + 1):
            if bar_norm(p, coned, k) != bar_norm(p, b, k):
                fail(f"cone changes the {k}-norm of cycle {report.cycles_checked}")

    while report.noncycles_checked < samples:
        c = random_bar_chain(p, int(rng.integers(1, 4)), rng)
        b = bar_boundary(c)
        if b.is_zero():
            continue
        report.noncycles_checked += 1
        if bar_boundary(cone(c)) + cone(b) != c:
            fail(f"homotopy identity fails on non-cycle {report.noncycles_checked}")

    if report.passed:
        logger.info(f"✅ Bar self-test passed: {report.cycles_checked} cycles, {report.noncycles_checked} non-cycles")
    else:
        logger.error(f"❌ Bar self-test failed: {report.failures[0]}")
    return report
