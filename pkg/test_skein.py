import math

import pytest

from qtop.services.invariants import InvariantService
from qtop.services.links import knot_table
from qtop.services.qcore import QParams, quantum_integer
from qtop.services.skein import kauffman_bracket


def _delta(p):
    a = p.qpow(0.5)
    return -a * a - 1 / (a * a)


def test_empty_and_trivial_closures(params):
    assert kauffman_bracket(params, 0, ()) == 1
    assert abs(kauffman_bracket(params, 1, ()) - _delta(params)) < 1e-12
    assert abs(kauffman_bracket(params, 2, ()) - _delta(params) ** 2) < 1e-12


def test_kink(params):
    # closure of σ1 is an unknot with one positive kink
    value = kauffman_bracket(params, 2, (1,))
    assert abs(value + params.qpow(1.5) * _delta(params)) < 1e-12
    value = kauffman_bracket(params, 2, (-1,))
    assert abs(value + params.qpow(-1.5) * _delta(params)) < 1e-12


def test_reidemeister_two(params):
    assert abs(kauffman_bracket(params, 3, (1, -1, 2)) - kauffman_bracket(params, 3, (2,))) < 1e-12


@pytest.mark.parametrize("r", [3, 4, 5, 7])
def test_unknot_colors(r):
    p = QParams(r=r)
    service = InvariantService(p)
    unknot = knot_table("unknot")
    assert abs(service.jones_skein(unknot, [1]) + 2 * math.cos(math.pi / r)) < 1e-12
    for n in range(r):
        assert abs(service.jones_skein(unknot, [n]) - (-1) ** n * quantum_integer(p, n + 1)) < 1e-10


def test_framing_uses_kink_value(p5):
    service = InvariantService(p5)
    unknot = knot_table("unknot")
    framed = service.jones_skein(unknot, [1], [1])
    assert abs(framed - (-p5.qpow(1.5)) * (-p5.q - 1 / p5.q)) < 1e-12


CASES = [
    ("unknot", [1]),
    ("unknot", [2]),
    ("trefoil", [1]),
    ("trefoil", [2]),
    ("figure8", [1]),
    ("figure8", [2]),
    ("hopf", [1, 1]),
    ("hopf", [1, 2]),
    ("hopf", [0, 2]),
]


@pytest.mark.parametrize("r", [3, 4, 5])
@pytest.mark.parametrize("name, colors", CASES)
def test_two_paths_agree(r, name, colors):
    if max(colors) > r - 1:
        pytest.skip("color outside 0..r−1")
    service = InvariantService(QParams(r=r))
    braid = knot_table(name)
    rt = service.jones_rt(braid, colors)
    skein = service.jones_skein(braid, colors)
    assert abs(rt - skein) < 1e-9 * max(1.0, abs(rt))


def test_two_paths_agree_with_framings(p5):
    service = InvariantService(p5)
    trefoil = knot_table("trefoil")
    for f in (-1, 0, 2):
        rt = service.jones_rt(trefoil, [2], [f])
        skein = service.jones_skein(trefoil, [2], [f])
        assert abs(rt - skein) < 1e-9 * max(1.0, abs(rt))
