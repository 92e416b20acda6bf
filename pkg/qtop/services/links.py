"""
Braid words, their closures and the combinatorial operations on them
(cabling, Markov moves, cutting a chosen component, linking data).
"""

import json
import logging
import re
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from qtop.services.errors import ContractError, GeneratorRangeError, ParseError
from qtop.services.qcore import FormalColor, QParams
from qtop.services.reps import WeightModule, module_from_label

logger = logging.getLogger(__name__)

Color = Union[WeightModule, FormalColor]


class BraidWord(BaseModel):
    model_config = ConfigDict(frozen=True)

    strands: int = Field(..., ge=1, description="Number of strands")
    letters: Tuple[int, ...] = Field(default=(), description="Signed 1-based generators, applied in order")

    @model_validator(mode="after")
    def _check_letters(self) -> "BraidWord":
        for index, letter in enumerate(self.letters):
            if letter == 0 or abs(letter) >= self.strands:
                raise GeneratorRangeError(
                    f"letter {letter} at index {index} is not a generator of the {self.strands}-strand braid group"
                )
        return self

    def __str__(self) -> str:
        return f"{self.strands}: " + " ".join(str(x) for x in self.letters)


KNOT_TABLE: Dict[str, str] = {
    "unknot": "1:",
    "trefoil": "2: 1 1 1",
    "figure8": "3: 1 -2 1 -2",
    "hopf": "2: 1 1",
}

_HEADER = re.compile(r"\s*(\d+)\s*:")
_LETTER = re.compile(r"[+-]?\d+")


def parse_braid(text: str) -> BraidWord:
    """
    Parses 'strands: l1 l2 …' such as '2: 1 1 1'.

    Raises:
        ParseError: malformed text, with the offending position.
        GeneratorRangeError: a letter outside ±1..±(strands−1).
    """
    header = _HEADER.match(text)
    if not header:
        raise ParseError("expected '<strands>:' header", 0)
    strands = int(header.group(1))
    if strands < 1:
        raise ParseError("strand count must be at least 1", header.start(1))
    letters = []
    pos = header.end()
    while pos < len(text):
        if text[pos].isspace() or text[pos] == ",":
            pos += 1
            continue
        token = _LETTER.match(text, pos)
        if not token:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        end = token.end()
        if end < len(text) and not (text[end].isspace() or text[end] == ","):
            raise ParseError(f"letters must be separated by whitespace, found {text[end]!r}", end)
        value = int(token.group(0))
        if value == 0:
            raise ParseError("generator 0 does not exist", pos)
        letters.append(value)
        pos = token.end()
    return BraidWord(strands=strands, letters=tuple(letters))


def knot_table(name: str) -> BraidWord:
    if name not in KNOT_TABLE:
        raise ContractError(f"unknown knot {name!r}; available: {', '.join(KNOT_TABLE)}")
    return parse_braid(KNOT_TABLE[name])


@dataclass(frozen=True)
class ClosureData:
    """Components of a braid closure with the crossing signs sorted by component pair."""

    components: List[List[int]]
    strand_component: List[int]
    crossing_sums: np.ndarray

    @property
    def count(self) -> int:
        return len(self.components)

    @property
    def self_writhe(self) -> List[int]:
        return [int(self.crossing_sums[i, i]) for i in range(self.count)]

    def linking(self, i: int, j: int) -> int:
        if i == j:
            raise ContractError("linking number needs two distinct components")
        return int(self.crossing_sums[i, j]) // 2

    @property
    def writhe(self) -> int:
        return int(np.triu(self.crossing_sums).sum())


def closure_components(braid: BraidWord) -> ClosureData:
    """
    Components of the closure, numbered by their smallest bottom position.

    Bottom position p of the braid carries strand p; a strand reaching top
    position p continues through the closure as strand p.
    """
    n = braid.strands
    strand_at = list(range(n))
    crossings: List[Tuple[int, int, int]] = []
    for letter in braid.letters:
        a = abs(letter) - 1
        crossings.append((strand_at[a], strand_at[a + 1], 1 if letter > 0 else -1))
        strand_at[a], strand_at[a + 1] = strand_at[a + 1], strand_at[a]
    successor = {strand_at[p]: p for p in range(n)}

    strand_component = [-1] * n
    components: List[List[int]] = []
    for start in range(n):
        if strand_component[start] >= 0:
            continue
        cycle = []
        s = start
        while strand_component[s] < 0:
            strand_component[s] = len(components)
            cycle.append(s)
            s = successor[s]
        components.append(sorted(cycle))

    m = len(components)
    sums = np.zeros((m, m), dtype=int)
    for s, t, sign in crossings:
        i, j = strand_component[s], strand_component[t]
        if i == j:
            sums[i, i] += sign
        else:
            sums[i, j] += sign
            sums[j, i] += sign
    return ClosureData(components, strand_component, sums)


@dataclass(frozen=True)
class ColoredBraidClosure:
    """
    A framed colored link given as a braid closure.

    colors and framings are indexed by component; cut selects the component
    opened into a (1,1)-tangle (None lets the evaluator choose).
    """

    braid: BraidWord
    colors: Tuple[Optional[Color], ...]
    framings: Tuple[int, ...] = ()
    cut: Optional[int] = None
    data: ClosureData = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        data = closure_components(self.braid)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "colors", tuple(self.colors))
        framings = tuple(self.framings) if self.framings else (0,) * data.count
        object.__setattr__(self, "framings", framings)
        if len(self.colors) != data.count:
            raise ContractError(f"closure has {data.count} components but {len(self.colors)} colors were given")
        if len(framings) != data.count:
            raise ContractError(f"closure has {data.count} components but {len(framings)} framings were given")
        if self.cut is not None and not 0 <= self.cut < data.count:
            raise ContractError(f"cut component {self.cut} does not exist")

    @property
    def component_count(self) -> int:
        return self.data.count

    def with_colors(self, colors: Sequence[Optional[Color]]) -> "ColoredBraidClosure":
        return replace(self, colors=tuple(colors))

    def with_cut(self, cut: Optional[int]) -> "ColoredBraidClosure":
        return replace(self, cut=cut)

    def position_colors(self) -> List[Optional[Color]]:
        return [self.colors[c] for c in self.data.strand_component]


def bring_to_front(braid: BraidWord, position: int) -> BraidWord:
    """Conjugate word whose closure is the same link with bottom position `position` moved to 0."""
    if not 0 <= position < braid.strands:
        raise ContractError(f"position {position} outside the braid")
    if position == 0:
        return braid
    prefix = tuple(-(k + 1) for k in range(position))
    suffix = tuple(k + 1 for k in reversed(range(position)))
    return BraidWord(strands=braid.strands, letters=prefix + braid.letters + suffix)


def front_colors(colors: Sequence, position: int) -> list:
    """Bottom colors after bring_to_front."""
    colors = list(colors)
    return [colors[position]] + colors[:position] + colors[position + 1:]


def mirror(braid: BraidWord) -> BraidWord:
    return BraidWord(strands=braid.strands, letters=tuple(-x for x in braid.letters))


def stabilize(braid: BraidWord, sign: int = 1) -> BraidWord:
    """Markov stabilization: add a strand and the letter ±strands."""
    if sign not in (1, -1):
        raise ContractError("stabilization sign must be +1 or -1")
    return BraidWord(strands=braid.strands + 1, letters=braid.letters + (sign * braid.strands,))


def conjugate(braid: BraidWord, generator: int) -> BraidWord:
    """σ_g^{-1} w σ_g, which has the same closure."""
    if not 1 <= abs(generator) < braid.strands:
        raise GeneratorRangeError(f"generator {generator} out of range for {braid.strands} strands")
    return BraidWord(strands=braid.strands, letters=(-generator,) + braid.letters + (generator,))


def _crossing_block(start: int, left: int, right: int) -> List[int]:
    """Positive crossing of a bundle of `left` strands over a bundle of `right` strands."""
    return [start + j + t + 1 for j in reversed(range(left)) for t in range(right)]


def cable_letters(braid: BraidWord, multiplicities: Sequence[int]) -> Tuple[int, List[int]]:
    """
    Blackboard cable: every strand of component i is replaced by
    multiplicities[i] parallel strands (0 deletes the component).

    Returns:
        The new strand count (possibly 0) and the letters.
    """
    data = closure_components(braid)
    if len(multiplicities) != data.count:
        raise ContractError(f"need {data.count} multiplicities, got {len(multiplicities)}")
    if any(m < 0 for m in multiplicities):
        raise ContractError("cable multiplicities must be non-negative")
    strand_at = list(range(braid.strands))
    mult = [multiplicities[data.strand_component[s]] for s in strand_at]
    letters: List[int] = []
    for letter in braid.letters:
        a = abs(letter) - 1
        start = sum(mult[:a])
        if letter > 0:
            letters.extend(_crossing_block(start, mult[a], mult[a + 1]))
        else:
            letters.extend(-x for x in reversed(_crossing_block(start, mult[a + 1], mult[a])))
        mult[a], mult[a + 1] = mult[a + 1], mult[a]
    return sum(mult), letters


def cable(braid: BraidWord, multiplicities: Sequence[int]) -> BraidWord:
    strands, letters = cable_letters(braid, multiplicities)
    if strands == 0:
        raise ContractError("cable deletes every component")
    return BraidWord(strands=strands, letters=tuple(letters))


def cable2(braid: BraidWord, twists: int) -> BraidWord:
    """
    2-cable of a knot with `twists` extra full twists between the two parallels.

    The parallels A (component 0) and B keep the self-writhe of the knot and
    link each other writhe + twists times.
    """
    if closure_components(braid).count != 1:
        raise ContractError("cable2 needs a knot (one-component closure)")
    doubled = cable(braid, [2])
    sign = 1 if twists >= 0 else -1
    extra = (sign,) * (2 * abs(twists))
    return BraidWord(strands=doubled.strands, letters=doubled.letters + extra)


def chebyshev_expand(n: int) -> Dict[int, int]:
    """Integer coefficients of T_n with T_0 = 1, T_1 = L, T_n = L·T_{n−1} − T_{n−2}, keyed by power of L."""
    if n < 0:
        raise ContractError("Chebyshev index must be non-negative")
    prev: Dict[int, int] = {0: 1}
    if n == 0:
        return prev
    cur: Dict[int, int] = {1: 1}
    for _ in range(n - 1):
        nxt: Dict[int, int] = {}
        for power, coeff in cur.items():
            nxt[power + 1] = nxt.get(power + 1, 0) + coeff
        for power, coeff in prev.items():
            nxt[power] = nxt.get(power, 0) - coeff
        prev, cur = cur, {k: v for k, v in nxt.items() if v}
    return cur


class LinkingData(BaseModel):
    matrix: List[List[int]]
    positive: int
    negative: int
    nullity: int
    abs_det: int


def linking_matrix(closure: ColoredBraidClosure, components: Optional[Sequence[int]] = None) -> np.ndarray:
    """Linking numbers off the diagonal and declared framings on it."""
    data = closure.data
    chosen = list(range(data.count)) if components is None else list(components)
    matrix = np.zeros((len(chosen), len(chosen)), dtype=int)
    for a, i in enumerate(chosen):
        for b, j in enumerate(chosen):
            matrix[a, b] = closure.framings[i] if i == j else data.linking(i, j)
    return matrix


def linking_data(closure: ColoredBraidClosure, components: Optional[Sequence[int]] = None) -> LinkingData:
    """Signature counts and |det| of the (sub)link's linking matrix."""
    matrix = linking_matrix(closure, components)
    if matrix.size == 0:
        return LinkingData(matrix=[], positive=0, negative=0, nullity=0, abs_det=1)
    eigenvalues = np.linalg.eigvalsh(matrix.astype(float))
    positive = int((eigenvalues > 1e-9).sum())
    negative = int((eigenvalues < -1e-9).sum())
    return LinkingData(
        matrix=matrix.tolist(),
        positive=positive,
        negative=negative,
        nullity=len(eigenvalues) - positive - negative,
        abs_det=int(round(abs(np.linalg.det(matrix.astype(float))))),
    )


def closure_to_json(closure: ColoredBraidClosure) -> str:
    """Stable JSON form; colors are written as labels."""
    colors = []
    for color in closure.colors:
        if isinstance(color, WeightModule):
            colors.append(color.name)
        elif color is None:
            colors.append(None)
        else:
            raise ContractError("formal colors have no JSON label")
    return json.dumps({
        "strands": closure.braid.strands,
        "word": list(closure.braid.letters),
        "colors": colors,
        "framings": list(closure.framings),
        "cut": closure.cut,
    }, sort_keys=True)


def closure_from_json(p: QParams, payload: Union[str, dict]) -> ColoredBraidClosure:
    if isinstance(payload, str):
        try:
            payload = json.loads(payload)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", e.pos)
    try:
        braid = BraidWord(strands=int(payload["strands"]), letters=tuple(int(x) for x in payload.get("word", [])))
        raw_colors = payload.get("colors") or []
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed link JSON: {e}")
    colors = [module_from_label(p, c) if c is not None else None for c in raw_colors]
    count = closure_components(braid).count
    if not colors:
        colors = [None] * count
    return ColoredBraidClosure(
        braid=braid,
        colors=tuple(colors),
        framings=tuple(int(x) for x in payload.get("framings") or ()),
        cut=payload.get("cut"),
    )
