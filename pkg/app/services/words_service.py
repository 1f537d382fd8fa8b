import logging
import re
from collections import deque
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from app import config
from app.errors import (
    EngineValidationError, MembershipUndecidableError, PresentationParseError, UnknownGeneratorError
)
from app.schemas.presentation_schema import Presentation, RewriteRule, SubgroupSpec

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]

IDENTITY: Word = ()


# ---------------------------------------------------------------------------
# Free-group word arithmetic
# ---------------------------------------------------------------------------

def free_reduce(letters: Iterable[int], rank: Optional[int] = None) -> Word:
    """Cancel adjacent inverse pairs. With ``rank`` given, letters are checked against it."""
    out: List[int] = []
    for x in letters:
        if rank is not None and (x == 0 or abs(x) > rank):
            raise UnknownGeneratorError(f"Letter {x} is not a declared generator")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def multiply(*words: Sequence[int]) -> Word:
    return free_reduce(x for w in words for x in w)


def cyclic_reduce(w: Sequence[int]) -> Tuple[Word, int]:
    """Cyclically reduce a freely reduced word.

    Returns the reduced core and the number of letters stripped from each end,
    so that ``w = w[:k] + core + inverse(w[:k])``.
    """
    w = free_reduce(w)
    k = 0
    while len(w) - 2 * k >= 2 and w[k] == -w[len(w) - 1 - k]:
        k += 1
    return tuple(w[k:len(w) - k]), k


def cyclic_conjugates(w: Sequence[int]) -> List[Word]:
    w = tuple(w)
    return [w[i:] + w[:i] for i in range(len(w))]


def letter_key(x: int) -> int:
    # a < A < b < B < ...
    return 2 * (abs(x) - 1) + (0 if x > 0 else 1)


def shortlex_key(w: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    return len(w), tuple(letter_key(x) for x in w)


def generator_letters(rank: int) -> List[int]:
    letters = []
    for i in range(1, rank + 1):
        letters.extend((i, -i))
    return letters


# ---------------------------------------------------------------------------
# Text <-> words
# ---------------------------------------------------------------------------

def format_word(p: Presentation, w: Sequence[int]) -> str:
    if not w:
        return "e"
    return "".join(p.generator_names[x - 1] if x > 0 else p.generator_names[-x - 1].upper() for x in w)


def parse_letters(names: Sequence[str], text: str, line_no: Optional[int] = None) -> Word:
    """Read a word such as ``abAB``; ``e`` or an empty string is the identity. No reduction is done."""
    text = text.strip()
    if text in ("", "e", "1"):
        return IDENTITY
    lookup = {name: i + 1 for i, name in enumerate(names)}
    letters = []
    for ch in text:
        if ch.isspace():
            continue
        if ch in lookup:
            letters.append(lookup[ch])
        elif ch.lower() in lookup:
            letters.append(-lookup[ch.lower()])
        else:
            raise UnknownGeneratorError(f"Unknown generator symbol '{ch}' in '{text}'", line_no)
    return tuple(letters)


def parse_word(p: Presentation, text: str) -> Word:
    return free_reduce(parse_letters(p.generator_names, text))


_SUBGROUP_RE = re.compile(r"^subgroup\s+([A-Za-z_][A-Za-z0-9_]*)$")


def parse_presentation(text: str) -> Presentation:
    """Parse the line-oriented presentation format.

    Grammar (one item per line, ``#`` starts a comment)::

        generators: a b c
        relators: abAB, aaa          (may repeat; items split on commas or spaces)
        subgroup H: a b
        engine: free-abelian-product
        rule: ba -> ab               (ordered; empty or 'e' right-hand side allowed)
    """
    names: Optional[Tuple[str, ...]] = None
    raw_relators: List[Tuple[str, int]] = []
    raw_subgroups: List[Tuple[str, str, int]] = []
    raw_rules: List[Tuple[str, str, int]] = []
    engine = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise PresentationParseError(f"Expected 'key: value', got '{line}'", line_no)
        key, value = (part.strip() for part in line.split(":", 1))
        if key == "generators":
            if names is not None:
                raise PresentationParseError("Generators declared twice", line_no)
            symbols = [s for s in re.split(r"[,\s]+", value) if s]
            seen = set()
            for s in symbols:
                if s in seen:
                    raise PresentationParseError(f"Duplicate generator symbol '{s}'", line_no)
                if len(s) != 1 or not s.islower() or s == "e":
                    raise PresentationParseError(
                        f"Generator symbol '{s}' must be a single lowercase letter other than 'e'", line_no)
                seen.add(s)
            names = tuple(symbols)
        elif key == "relators":
            raw_relators.extend((item, line_no) for item in re.split(r"[,\s]+", value) if item)
        elif _SUBGROUP_RE.match(key):
            raw_subgroups.append((_SUBGROUP_RE.match(key).group(1), value, line_no))
        elif key == "engine":
            engine = value
        elif key == "rule":
            if "->" not in value:
                raise PresentationParseError(f"Rule '{value}' must have the form 'lhs -> rhs'", line_no)
            lhs, rhs = (part.strip() for part in value.split("->", 1))
            raw_rules.append((lhs, rhs, line_no))
        else:
            raise PresentationParseError(f"Unknown key '{key}'", line_no)

    if names is None:
        raise PresentationParseError("Missing 'generators:' line")

    relators = []
    for item, line_no in raw_relators:
        letters = parse_letters(names, item, line_no)
        if not letters:
            raise PresentationParseError("Relators must be nonempty", line_no)
        if free_reduce(letters) != letters:
            raise PresentationParseError(f"Relator '{item}' is not freely reduced", line_no)
        core, k = cyclic_reduce(letters)
        if k:
            logger.warning(f"⚠️ Relator '{item}' (line {line_no}) cyclically reduced to length {len(core)}")
        relators.append(core)

    subgroups = []
    for name, value, line_no in raw_subgroups:
        gens = []
        for s in (s for s in re.split(r"[,\s]+", value) if s):
            if s not in names:
                raise UnknownGeneratorError(f"Subgroup {name} uses undeclared generator '{s}'", line_no)
            gens.append(names.index(s) + 1)
        if not gens:
            raise PresentationParseError(f"Subgroup {name} has no generators", line_no)
        if any(name == other.name for other in subgroups):
            raise PresentationParseError(f"Duplicate subgroup name '{name}'", line_no)
        subgroups.append(SubgroupSpec(name=name, generators=tuple(sorted(set(gens)))))

    rules = []
    for lhs, rhs, line_no in raw_rules:
        lhs_w = parse_letters(names, lhs, line_no)
        if not lhs_w:
            raise PresentationParseError("Rule left-hand side must be nonempty", line_no)
        rules.append(RewriteRule(lhs=lhs_w, rhs=parse_letters(names, rhs, line_no)))

    try:
        return Presentation(
            generator_names=names,
            relators=tuple(relators),
            subgroups=tuple(subgroups),
            engine=engine,
            rules=tuple(rules),
        )
    except ValidationError as e:
        raise PresentationParseError(f"Invalid presentation: {e.errors()[0]['msg']}")


# ---------------------------------------------------------------------------
# Normal-form engines
# ---------------------------------------------------------------------------

class NormalFormEngine:
    strategy = "abstract"
    geodesic = True  # nf length equals word length

    def __init__(self, rank: int):
        self.rank = rank

    def normal_form(self, w: Sequence[int]) -> Word:
        raise NotImplementedError

    def coset_key(self, w: Sequence[int], subgroup: FrozenSet[int]) -> Word:
        raise MembershipUndecidableError(
            f"Coset membership is not decidable under the {self.strategy} engine")

    def describe(self) -> str:
        return self.strategy


class FreeEngine(NormalFormEngine):
    strategy = "free"

    def normal_form(self, w):
        return free_reduce(w)

    def coset_key(self, w, subgroup):
        nf = list(self.normal_form(w))
        while nf and abs(nf[-1]) in subgroup:
            nf.pop()
        return tuple(nf)


class FreeAbelianEngine(NormalFormEngine):
    """Exponent-vector normal form on a block of commuting generators."""
    strategy = "free-abelian"

    def __init__(self, rank: int, generators: Optional[Sequence[int]] = None):
        super().__init__(rank)
        self.generators = tuple(sorted(generators)) if generators else tuple(range(1, rank + 1))

    def exponents(self, w) -> Dict[int, int]:
        exps = {g: 0 for g in self.generators}
        for x in w:
            exps[abs(x)] += 1 if x > 0 else -1
        return exps

    def _from_exponents(self, exps: Dict[int, int]) -> Word:
        out: List[int] = []
        for g in self.generators:
            n = exps[g]
            out.extend([g] * n if n > 0 else [-g] * (-n))
        return tuple(out)

    def normal_form(self, w):
        return self._from_exponents(self.exponents(w))

    def coset_key(self, w, subgroup):
        exps = self.exponents(w)
        for g in subgroup:
            if g in exps:
                exps[g] = 0
        return self._from_exponents(exps)


class FreeProductEngine(NormalFormEngine):
    """Free product of engines on disjoint generator blocks, normal form by syllables."""
    strategy = "free-abelian-product"

    def __init__(self, rank: int, factors: Sequence[NormalFormEngine]):
        super().__init__(rank)
        self.factors = list(factors)
        self.factor_of: Dict[int, int] = {}
        for i, f in enumerate(self.factors):
            for g in f.generators:
                self.factor_of[g] = i

    def _syllables(self, w) -> List[Tuple[int, Word]]:
        stack: List[Tuple[int, Word]] = []
        for x in w:
            f = self.factor_of[abs(x)]
            if stack and stack[-1][0] == f:
                merged = self.factors[f].normal_form(stack[-1][1] + (x,))
                if merged:
                    stack[-1] = (f, merged)
                else:
                    stack.pop()
            else:
                stack.append((f, (x,)))
        return stack

    def normal_form(self, w):
        return tuple(x for _, syl in self._syllables(w) for x in syl)

    def coset_key(self, w, subgroup):
        stack = self._syllables(w)
        while stack:
            f, syl = stack[-1]
            rest = self.factors[f].coset_key(syl, subgroup)
            if rest:
                stack[-1] = (f, rest)
                break
            stack.pop()
        return tuple(x for _, syl in stack for x in syl)

    def describe(self):
        blocks = ["{" + ",".join(str(g) for g in f.generators) + "}" for f in self.factors]
        return f"{self.strategy}({' * '.join(blocks)})"


class RewritingEngine(NormalFormEngine):
    """Ordered string-rewriting system with implicit free cancellation.

    Rules must decrease in shortlex order; local confluence is checked on all
    critical pairs when the engine is built.
    """
    strategy = "rewriting"
    geodesic = False

    def __init__(self, rank: int, rules: Sequence[Tuple[Word, Word]]):
        super().__init__(rank)
        free_rules = [((x, -x), ()) for x in generator_letters(rank)]
        self.rules: List[Tuple[Word, Word]] = list(rules) + free_rules
        self.max_lhs = max(len(lhs) for lhs, _ in self.rules)
        self._by_last: Dict[int, List[Tuple[Word, Word]]] = {}
        for lhs, rhs in self.rules:
            self._by_last.setdefault(lhs[-1], []).append((lhs, rhs))

    def normal_form(self, w):
        out: List[int] = []
        pending = list(reversed(w))
        while pending:
            out.append(pending.pop())
            for lhs, rhs in self._by_last.get(out[-1], ()):
                n = len(lhs)
                if len(out) >= n and tuple(out[-n:]) == lhs:
                    del out[-n:]
                    pending.extend(reversed(rhs))
                    break
        return tuple(out)

    def validate(self):
        for lhs, rhs in self.rules:
            if shortlex_key(rhs) >= shortlex_key(lhs):
                raise EngineValidationError(f"Rule {lhs} -> {rhs} does not decrease in shortlex order")
        for lhs1, rhs1 in self.rules:
            for lhs2, rhs2 in self.rules:
                for word, left, right in _critical_pairs(lhs1, rhs1, lhs2, rhs2):
                    if self.normal_form(left) != self.normal_form(right):
                        raise EngineValidationError(
                            f"Rewriting system is not confluent: overlap {word} reduces to "
                            f"{self.normal_form(left)} and {self.normal_form(right)}")
        logger.info(f"✅ Rewriting system with {len(self.rules)} rules is locally confluent")


def _critical_pairs(lhs1, rhs1, lhs2, rhs2):
    """Overlap words of two rules with their two one-step rewrites."""
    n1, n2 = len(lhs1), len(lhs2)
    for k in range(1, min(n1, n2)):
        if lhs1[n1 - k:] == lhs2[:k]:
            word = lhs1 + lhs2[k:]
            yield word, rhs1 + lhs2[k:], lhs1[:n1 - k] + rhs2
    if n2 < n1 or (n2 == n1 and lhs1 != lhs2):
        for i in range(n1 - n2 + 1):
            if lhs1[i:i + n2] == lhs2:
                yield lhs1, rhs1, lhs1[:i] + rhs2 + lhs1[i + n2:]


def _commuting_pair(r: Word) -> Optional[Tuple[int, int]]:
    """Return the generator pair if r is a cyclic conjugate of a commutator [x, y]^{±1}."""
    if len(r) != 4:
        return None
    for c in cyclic_conjugates(r):
        x, y, xi, yi = c
        if abs(x) != abs(y) and xi == -x and yi == -y:
            return tuple(sorted((abs(x), abs(y))))
    return None


def _commutator_blocks(p: Presentation) -> Optional[List[List[int]]]:
    pairs = set()
    for r in p.relators:
        pair = _commuting_pair(r)
        if pair is None:
            return None
        pairs.add(pair)
    parent = list(range(p.rank + 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        parent[find(a)] = find(b)
    blocks: Dict[int, List[int]] = {}
    for g in range(1, p.rank + 1):
        blocks.setdefault(find(g), []).append(g)
    result = sorted(blocks.values())
    for block in result:
        for i, a in enumerate(block):
            for b in block[i + 1:]:
                if (a, b) not in pairs:
                    return None
    return result


def infer_engine_tag(p: Presentation) -> str:
    if p.rules:
        return "rewriting"
    if not p.relators:
        return "free"
    blocks = _commutator_blocks(p)
    if blocks is None:
        raise EngineValidationError(
            "Cannot infer a word-problem engine: relators are not commutators of generators; "
            "supply a confluent rewriting system with 'rule:' lines")
    return "free-abelian" if len(blocks) == 1 else "free-abelian-product"


@lru_cache(maxsize=64)
def get_engine(p: Presentation) -> NormalFormEngine:
    tag = p.engine or infer_engine_tag(p)
    if p.rules and tag != "rewriting":
        raise EngineValidationError(f"Rewriting rules given but engine is '{tag}'")
    if tag == "free":
        if p.relators:
            raise EngineValidationError("Engine 'free' requires a presentation without relators")
        engine = FreeEngine(p.rank)
    elif tag in ("free-abelian", "free-abelian-product"):
        blocks = _commutator_blocks(p) if p.relators else [[g] for g in range(1, p.rank + 1)]
        if blocks is None:
            raise EngineValidationError(f"Relators do not define a {tag} group")
        if tag == "free-abelian" and len(blocks) != 1:
            raise EngineValidationError("Relators do not make every pair of generators commute")
        if len(blocks) == 1:
            engine = FreeAbelianEngine(p.rank, blocks[0])
        else:
            engine = FreeProductEngine(p.rank, [FreeAbelianEngine(p.rank, b) for b in blocks])
    else:
        if not p.rules:
            raise EngineValidationError("Engine 'rewriting' needs at least one 'rule:' line")
        engine = RewritingEngine(p.rank, [(r.lhs, r.rhs) for r in p.rules])
        engine.validate()
        for r in p.relators:
            if engine.normal_form(r):
                raise EngineValidationError(f"Relator {format_word(p, r)} does not rewrite to e")
    logger.info(f"🚀 Word-problem engine: {engine.describe()}")
    return engine


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def normal_form(p: Presentation, w: Sequence[int]) -> Word:
    return get_engine(p).normal_form(free_reduce(w, p.rank))


def word_length_status(p: Presentation, w: Sequence[int]) -> Tuple[int, bool]:
    """Word length and whether it is exact (False when the bounded search was truncated)."""
    engine = get_engine(p)
    target = engine.normal_form(free_reduce(w, p.rank))
    if engine.geodesic:
        return len(target), True
    return _bfs_length(p, target)


@lru_cache(maxsize=4096)
def _bfs_length(p: Presentation, target: Word) -> Tuple[int, bool]:
    engine = get_engine(p)
    if not target:
        return 0, True
    seen = {IDENTITY}
    frontier = deque([(IDENTITY, 0)])
    letters = generator_letters(p.rank)
    while frontier:
        v, d = frontier.popleft()
        for s in letters:
            u = engine.normal_form(v + (s,))
            if u == target:
                return d + 1, True
            if u not in seen:
                if len(seen) >= config.BFS_WORD_CAP:
                    logger.warning("⚠️ Word-length search truncated; reporting normal-form length as upper bound")
                    return len(target), False
                seen.add(u)
                frontier.append((u, d + 1))
    return len(target), False


def word_length(p: Presentation, w: Sequence[int]) -> int:
    return word_length_status(p, w)[0]


def distance(p: Presentation, v: Sequence[int], w: Sequence[int]) -> int:
    return word_length(p, multiply(inverse(v), w))


def coset_key(p: Presentation, w: Sequence[int], subgroup: Iterable[int]) -> Word:
    return get_engine(p).coset_key(free_reduce(w, p.rank), frozenset(subgroup))
