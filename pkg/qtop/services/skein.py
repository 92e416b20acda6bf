"""
Kauffman-bracket evaluation of braid closures in the Temperley–Lieb algebra.

This path never touches the R-matrix: crossings expand as
σ = A + A^{-1} e and σ^{-1} = A^{-1} + A e with A = q^{1/2}, and each closed
loop contributes δ = −A² − A^{-2}. It is used as an independent check of the
representation-theoretic colored Jones evaluation.
"""

import logging
from collections import defaultdict
from functools import lru_cache
from typing import Dict, Tuple

from qtop.services.qcore import QParams

logger = logging.getLogger(__name__)

# A Temperley–Lieb diagram on n strands is a perfect matching of 2n points:
# bottom points 0..n−1 and top points n..2n−1.
Matching = Tuple[int, ...]


def _identity(n: int) -> Matching:
    return tuple(list(range(n, 2 * n)) + list(range(n)))


def _multiply_cupcap(matching: Matching, n: int, i: int) -> Tuple[Matching, int]:
    """Stacks e_i on top of the diagram; returns the new matching and the closed loop count."""
    m = list(matching)
    t1, t2 = n + i, n + i + 1
    loops = 0
    if m[t1] == t2:
        loops = 1
    else:
        a, b = m[t1], m[t2]
        m[a], m[b] = b, a
    m[t1], m[t2] = t2, t1
    return tuple(m), loops


def _closure_loops(matching: Matching, n: int) -> int:
    seen = [False] * (2 * n)
    loops = 0
    for start in range(2 * n):
        if seen[start]:
            continue
        loops += 1
        x = start
        while True:
            y = matching[x]
            seen[x] = seen[y] = True
            x = y - n if y >= n else y + n
            if x == start:
                break
    return loops


@lru_cache(maxsize=1024)
def kauffman_bracket(p: QParams, strands: int, letters: Tuple[int, ...]) -> complex:
    """
    Bracket of the braid closure, normalized so that the unknot gives δ.

    The empty diagram (strands == 0) evaluates to 1.
    """
    if strands == 0:
        return 1 + 0j
    a = p.qpow(0.5)
    delta = -a * a - 1 / (a * a)
    state: Dict[Matching, complex] = {_identity(strands): 1 + 0j}
    for letter in letters:
        i = abs(letter) - 1
        c_id, c_e = (a, 1 / a) if letter > 0 else (1 / a, a)
        nxt: Dict[Matching, complex] = defaultdict(complex)
        for matching, coeff in state.items():
            nxt[matching] += c_id * coeff
            product, loops = _multiply_cupcap(matching, strands, i)
            nxt[product] += c_e * coeff * delta ** loops
        state = nxt
    logger.debug("TL evaluation on %d strands kept %d diagrams", strands, len(state))
    return sum((coeff * delta ** _closure_loops(m, strands) for m, coeff in state.items()), 0j)
