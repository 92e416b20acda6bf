"""
Link and 3-manifold invariants evaluated on braid closures.

InvariantService bundles the evaluators for one root of unity:
the renormalized bracket ⟨T⟩, the closed Reshetikhin–Turaev value F, the
modified invariant F′, colored Jones by two independent paths, the WRT
invariant of SO(3) type and the non-semisimple invariants N_r and N⁰_r.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from qtop.config import Settings, get_settings
from qtop.services.errors import ContractError
from qtop.services.links import (
    BraidWord,
    ColoredBraidClosure,
    bring_to_front,
    cable2,
    cable_letters,
    chebyshev_expand,
    closure_components,
    front_colors,
    linking_data,
    linking_matrix,
)
from qtop.services.qcore import (
    FormalColor,
    QParams,
    degree_of,
    delta_cgp,
    delta_so3,
    hr_set,
    is_integral,
    kirby_color,
    kirby_rt,
    mdim,
    nearest_integer,
    qnum,
)
from qtop.services.reps import ModuleKind, WeightModule, is_atypical_typical, qdim, simple_module, typical_module
from qtop.services.ribbon import braid_operators, partial_qtrace, scalar_of, twist_scalar
from qtop.services.skein import kauffman_bracket

logger = logging.getLogger(__name__)

Term = Tuple[complex, Tuple[WeightModule, ...]]


@dataclass
class Triple:
    """
    A surgery presentation (M, T, ω): surgery components carry a degree
    (the cohomology class on their meridian), the others are cargo colored
    by a module. cargo_degrees optionally pins the class of a cargo meridian.
    """

    braid: Optional[BraidWord]
    framings: Tuple[int, ...] = ()
    surgery: Dict[int, complex] = field(default_factory=dict)
    cargo: Dict[int, WeightModule] = field(default_factory=dict)
    cargo_degrees: Dict[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        count = closure_components(self.braid).count if self.braid is not None else 0
        overlap = set(self.surgery) & set(self.cargo)
        if overlap:
            raise ContractError(f"components {sorted(overlap)} are both surgery and cargo")
        assigned = set(self.surgery) | set(self.cargo)
        if assigned != set(range(count)):
            raise ContractError(f"every one of the {count} components must be surgery or cargo")
        if self.framings and len(self.framings) != count:
            raise ContractError(f"need {count} framings, got {len(self.framings)}")
        self.framings = tuple(self.framings) if self.framings else (0,) * count

    @property
    def surgery_components(self) -> List[int]:
        return sorted(self.surgery)


def knot_surgery(knot: BraidWord, framing: int, omega: int = 0) -> Triple:
    """Surgery on a framed knot with meridian class ω and no cargo."""
    return Triple(braid=knot, framings=(framing,), surgery={0: complex(omega)})


class InvariantService:
    def __init__(self, params: QParams, settings: Optional[Settings] = None):
        self.params = params
        self.settings = settings or get_settings()

    # ------------------------------------------------------------------ helpers

    def _expand(self, closure: ColoredBraidClosure) -> List[Term]:
        """Multilinear expansion of formal colors into concrete colorings."""
        choices = []
        for index, color in enumerate(closure.colors):
            if color is None:
                raise ContractError(f"component {index} has no color")
            if isinstance(color, FormalColor):
                choices.append(list(color))
            else:
                choices.append([(1 + 0j, color)])
        terms = []
        for combo in itertools.product(*choices):
            coeff = 1 + 0j
            for c, _ in combo:
                coeff *= c
            terms.append((coeff, tuple(m for _, m in combo)))
        return terms

    def _sum_terms(self, evaluate: Callable[[Term, int], complex], terms: Sequence[Term]) -> complex:
        threads = self.settings.threads
        logger.debug("evaluating %d colorings on %d threads", len(terms), threads)
        if threads > 1 and len(terms) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(lambda t: evaluate(t, 1), terms))
        else:
            values = [evaluate(t, threads) for t in terms]
        return sum(values, 0j)

    def _framing_factor(self, closure: ColoredBraidClosure, modules: Sequence[WeightModule]) -> complex:
        factor = 1 + 0j
        for module, framing, writhe in zip(modules, closure.framings, closure.data.self_writhe):
            if framing != writhe:
                factor *= twist_scalar(self.params, module) ** (framing - writhe)
        return factor

    def _first_typical(self, modules: Sequence[WeightModule], preferred: Optional[int]) -> int:
        def usable(m: WeightModule) -> bool:
            return m.kind is ModuleKind.TYPICAL and not is_atypical_typical(m)

        if preferred is not None and usable(modules[preferred]):
            return preferred
        for index, module in enumerate(modules):
            if usable(module):
                return index
        raise ContractError("F′ needs at least one component with a typical color")

    # ------------------------------------------------------------------ link invariants

    def bracket(self, closure: ColoredBraidClosure, threads: Optional[int] = None) -> complex:
        """
        ⟨T⟩: the scalar of the (1,1)-tangle obtained by cutting component `cut`
        (default 0), corrected to the declared framings.

        Raises:
            NumericalError: when the open endomorphism is not scalar.
        """
        p = self.params
        modules = list(closure.colors)
        if not all(isinstance(m, WeightModule) for m in modules):
            raise ContractError("bracket needs one concrete module per component")
        cut = closure.cut if closure.cut is not None else 0
        position = closure.data.components[cut][0]
        braid = bring_to_front(closure.braid, position)
        bottom = front_colors(closure.position_colors(), position)
        ops, _ = braid_operators(p, braid.letters, bottom)

        total = math.prod(m.dim for m in bottom)
        if self.settings.check_scalar and total <= self.settings.scalar_check_max_dim:
            columns = list(range(bottom[0].dim))
        else:
            columns = [0]
        matrix = partial_qtrace(ops, bottom, keep=0, columns=columns, threads=threads)
        value = scalar_of(matrix, columns, f"open component {cut}")
        return value * self._framing_factor(closure, modules)

    def f_closed(self, closure: ColoredBraidClosure) -> complex:
        """Reshetikhin–Turaev value F = qdim(cut color)·⟨T⟩ for simple colors."""
        cut = closure.cut if closure.cut is not None else 0

        def evaluate(term: Term, threads: int) -> complex:
            coeff, modules = term
            if any(m.kind.family != "simple" for m in modules):
                raise ContractError("F needs simple colors; use F′ for typical ones")
            concrete = closure.with_colors(modules).with_cut(cut)
            return coeff * qdim(modules[cut]) * self.bracket(concrete, threads)

        return self._sum_terms(evaluate, self._expand(closure))

    def f_prime(self, closure: ColoredBraidClosure) -> complex:
        """Modified invariant F′ = d(α_cut)·⟨T⟩, cutting a typical component."""

        def evaluate(term: Term, threads: int) -> complex:
            coeff, modules = term
            cut = self._first_typical(modules, closure.cut)
            concrete = closure.with_colors(modules).with_cut(cut)
            return coeff * mdim(self.params, modules[cut].label) * self.bracket(concrete, threads)

        return self._sum_terms(evaluate, self._expand(closure))

    def _check_colors(self, colors: Sequence[int]) -> None:
        for n in colors:
            if not 0 <= n <= self.params.r - 1:
                raise ContractError(f"colored Jones colors must lie in 0..{self.params.r - 1}, got {n}")

    def jones_rt(self, braid: BraidWord, colors: Sequence[int], framings: Sequence[int] = ()) -> complex:
        """J_{n⃗}(L) from the R-matrix evaluation of the closure colored by S_{n_i}."""
        self._check_colors(colors)
        logger.info("jones_rt r=%d braid=%s colors=%s", self.params.r, braid, list(colors))
        closure = ColoredBraidClosure(braid, tuple(simple_module(self.params, n) for n in colors), tuple(framings))
        return self.f_closed(closure)

    def jones_skein(self, braid: BraidWord, colors: Sequence[int], framings: Sequence[int] = ()) -> complex:
        """J_{n⃗}(L) from Chebyshev cabling and the Temperley–Lieb bracket."""
        self._check_colors(colors)
        logger.info("jones_skein r=%d braid=%s colors=%s", self.params.r, braid, list(colors))
        p = self.params
        data = closure_components(braid)
        if len(colors) != data.count:
            raise ContractError(f"closure has {data.count} components but {len(colors)} colors were given")
        framings = tuple(framings) if framings else (0,) * data.count
        expansions = [sorted(chebyshev_expand(n).items()) for n in colors]
        total = 0j
        for combo in itertools.product(*expansions):
            coeff = 1
            for _, c in combo:
                coeff *= c
            strands, letters = cable_letters(braid, [k for k, _ in combo])
            total += coeff * kauffman_bracket(p, strands, tuple(letters))
        for n, framing, writhe in zip(colors, framings, data.self_writhe):
            kink = (-1) ** n * p.qpow((n * n + 2 * n) / 2)
            total *= kink ** (framing - writhe)
        return total

    # ------------------------------------------------------------------ 3-manifold invariants

    def _surgery_closure(self, t: Triple, colors: Dict[int, object], cut: Optional[int] = None) -> ColoredBraidClosure:
        ordered = tuple(colors[c] for c in range(len(colors)))
        return ColoredBraidClosure(t.braid, ordered, t.framings, cut)

    def wrt(self, t: Triple) -> complex:
        """
        WRT_r(M, T, ω) = F(L ∪ T) / ((Δ^SO3_+)^p (Δ^SO3_−)^s) with Kirby colors Ω^RT_{ω}.

        Raises:
            ContractError: when a meridian class is not integral, a cargo color
                is not simple or has the wrong parity, or the classes do not
                satisfy the linking-matrix parity condition.
        """
        p = self.params
        p.require_manifold_order()
        if t.braid is None:
            return 1 + 0j
        colors: Dict[int, object] = {}
        for c, degree in t.surgery.items():
            g = nearest_integer(degree)
            if g is None:
                raise ContractError(f"WRT needs integral meridian classes, component {c} has {degree}")
            colors[c] = kirby_rt(p, g % 2)
        for c, module in t.cargo.items():
            if module.kind.family != "simple":
                raise ContractError(f"WRT cargo must be simple, component {c} is {module.name}")
            self.cargo_degree(t, c)
            colors[c] = module
        closure = self._surgery_closure(t, colors)
        self.kirby_lift_check(t, closure)
        signature = linking_data(closure, t.surgery_components)
        value = self.f_closed(closure)
        logger.info("wrt r=%d braid=%s signature=(%d, %d)", p.r, t.braid, signature.positive, signature.negative)
        return value / (delta_so3(p, 1) ** signature.positive * delta_so3(p, -1) ** signature.negative)

    def wrt_so3(self, braid: BraidWord, framings: Sequence[int], cargo: Optional[Dict[int, WeightModule]] = None) -> complex:
        """WRT with every surgery meridian in the trivial class."""
        cargo = cargo or {}
        count = closure_components(braid).count
        surgery = {c: 0j for c in range(count) if c not in cargo}
        return self.wrt(Triple(braid=braid, framings=tuple(framings), surgery=surgery, cargo=cargo))

    def cargo_degree(self, t: Triple, component: int) -> complex:
        """
        Meridian class of a cargo component in C/2Z.

        A pinned class must agree with the weights of the color mod 2
        (for S_n: the parity of n); without one the color's own class is used.
        """
        module = t.cargo[component]
        if component not in t.cargo_degrees:
            return module.degree
        expected = degree_of(t.cargo_degrees[component])
        gap = degree_of(module.degree - expected)
        if min(abs(gap), abs(gap - 2)) > 1e-9:
            raise ContractError(
                f"cargo {module.name} on component {component} has degree {module.degree}, not {expected}"
            )
        return expected

    def kirby_lift_check(self, t: Triple, closure: ColoredBraidClosure) -> None:
        """
        Raises ContractError unless every surgery row of the linking matrix
        pairs the meridian classes to an even integer.
        """
        matrix = linking_matrix(closure)
        degrees = []
        for c in range(closure.component_count):
            degrees.append(complex(t.surgery[c]) if c in t.surgery else self.cargo_degree(t, c))
        for i in t.surgery_components:
            total = sum(int(matrix[i, j]) * degrees[j] for j in range(len(degrees)))
            half = complex(total) / 2
            if abs(half - round(half.real)) > 1e-9:
                raise ContractError(
                    f"meridian classes do not define a cohomology class: row {i} sums to {total}, not an even integer"
                )

    def nr(self, t: Triple, canonical_lift: bool = True) -> complex:
        """
        N_r(M, T, ω) = F′(L ∪ T) / (Δ_+^p Δ_−^s) with Kirby colors Ω_{ω(m_i)}.

        With canonical_lift the Kirby degrees are taken with real part in [0, 2);
        otherwise the given values are used as lifts.
        """
        p = self.params
        p.require_manifold_order()
        if t.braid is None:
            raise ContractError("N_r of a triple without cargo needs a surgery link")
        for c, degree in t.surgery.items():
            if is_integral(degree):
                raise ContractError(
                    f"surgery component {c} has integral class {degree}; the presentation is not computable"
                )
        if not t.surgery and not any(m.kind is ModuleKind.TYPICAL for m in t.cargo.values()):
            raise ContractError("N_r needs a non-integral class or a typical cargo color")

        colors: Dict[int, object] = {}
        for c, module in t.cargo.items():
            self.cargo_degree(t, c)
            colors[c] = module
        for c, degree in t.surgery.items():
            colors[c] = kirby_color(p, degree_of(degree) if canonical_lift else complex(degree))
        cut = next((c for c in sorted(t.cargo) if t.cargo[c].kind is ModuleKind.TYPICAL), None)
        closure = self._surgery_closure(t, colors, cut)
        self.kirby_lift_check(t, closure)

        signature = linking_data(closure, t.surgery_components)
        value = self.f_prime(closure)
        logger.info("nr r=%d braid=%s signature=(%d, %d)", p.r, t.braid, signature.positive, signature.negative)
        return value / (delta_cgp(p, 1) ** signature.positive * delta_cgp(p, -1) ** signature.negative)

    def _knot_checks(self, knot: BraidWord, framing: int, omega: int, allow_zero: bool = False) -> int:
        self.params.require_manifold_order()
        if closure_components(knot).count != 1:
            raise ContractError("expected a knot (one-component closure)")
        if framing == 0 and not allow_zero:
            raise ContractError("this formula needs a non-zero framing")
        if omega not in (0, 1):
            raise ContractError(f"ω must be 0 or 1, got {omega}")
        return (self.params.r - 1 + omega) % 2

    def nr0_knot(self, knot: BraidWord, framing: int, omega: int) -> complex:
        """
        N⁰_r of surgery on a framed knot:
        r f / ({1} Δ_{sign f}) · Σ_{n=0}^{r−1} (q^k − q^e){k}⟨T^f_{V_k}⟩ with k = 2n+e.
        """
        p = self.params
        e = self._knot_checks(knot, framing, omega)
        sign = 1 if framing > 0 else -1
        logger.info("nr0_knot r=%d knot=%s f=%d omega=%d", p.r, knot, framing, omega)
        total = 0j
        for n in range(p.r):
            k = 2 * n + e
            total += (p.qpow(k) - p.qpow(e)) * qnum(p, k) * self.twisted_bracket(knot, k, framing)
        return p.r * framing / (qnum(p, 1) * delta_cgp(p, sign)) * total

    def nr0_knot_cabled(self, knot: BraidWord, framing: int, omega: int, alpha: Optional[complex] = None) -> complex:
        """
        N⁰_r from the 2-cable of the knot colored (V_α, Ω_{e−α}):
        F′(DK) / (Δ_{sign f} d(α)). Independent of the generic α.
        """
        p = self.params
        e = self._knot_checks(knot, framing, omega)
        if alpha is None:
            alpha = self.settings.default_alpha
            if is_integral(alpha):
                alpha += complex(0.1234, 0.0567)
        alpha = complex(alpha)
        if is_integral(alpha):
            raise ContractError(f"α={alpha} is integral; the cabled colors would not be typical")
        logger.info("nr0_knot_cabled r=%d knot=%s f=%d omega=%d alpha=%s", p.r, knot, framing, omega, alpha)
        writhe = closure_components(knot).self_writhe[0]
        doubled = cable2(knot, framing - writhe)
        colors = (typical_module(p, alpha), kirby_color(p, e - alpha))
        closure = ColoredBraidClosure(doubled, colors, (framing, framing), 0)
        sign = 1 if framing > 0 else -1
        return self.f_prime(closure) / (delta_cgp(p, sign) * mdim(p, alpha))

    def twisted_bracket(self, knot: BraidWord, color: complex, framing: int) -> complex:
        """⟨T^f_{V_k}⟩ = θ_k^{f−w}·⟨T_{V_k}⟩ for the knot redrawn with framing f; k may be integral."""
        closure = ColoredBraidClosure(knot, (typical_module(self.params, color),), (framing,), 0)
        return self.bracket(closure)

    def knot_fprime(self, knot: BraidWord, framing: int, color: complex) -> complex:
        return mdim(self.params, color) * self.twisted_bracket(knot, color, framing)

    def p_function(self, knot: BraidWord, framing: int, gamma: complex) -> complex:
        """P(γ) = Σ_{k∈H_r} F′(K^f_{γ+k}), the value of the 2-cable colored by any V_α, V_β with α+β = γ."""
        return sum((self.knot_fprime(knot, framing, gamma + k) for k in hr_set(self.params)), 0j)

    def nr0_knot_limit(self, knot: BraidWord, framing: int, omega: int) -> complex:
        """
        ε-limit of Σ_{k,ℓ∈H_r} q^{ℓ+e} F′(K^f_{ε+k+ℓ+e}), Richardson-extrapolated.

        Normalized by (−1)^ω/Δ_{sign f} for f ≠ 0; returned raw for f = 0,
        where it vanishes.
        """
        p = self.params
        e = self._knot_checks(knot, framing, omega, allow_zero=True)
        logger.info("nr0_knot_limit r=%d knot=%s f=%d omega=%d", p.r, knot, framing, omega)
        hr = hr_set(p)

        def partial_sum(eps: float) -> complex:
            cache: Dict[int, complex] = {}
            total = 0j
            for k in hr:
                for l in hr:
                    if k + l not in cache:
                        cache[k + l] = self.knot_fprime(knot, framing, eps + k + l + e)
                    total += p.qpow(l + e) * cache[k + l]
            return total

        eps = self.settings.epsilon
        limit = (10 * partial_sum(eps / 10) - partial_sum(eps)) / 9
        if framing == 0:
            return limit
        sign = 1 if framing > 0 else -1
        return (-1) ** omega * limit / delta_cgp(p, sign)

    def nr0_connected_sum(self, summands: Sequence[Tuple[BraidWord, int, int]]) -> complex:
        """N⁰_r is multiplicative under connected sum of knot surgeries."""
        value = 1 + 0j
        for knot, framing, omega in summands:
            value *= self.nr0_knot(knot, framing, omega)
        return value

    def ord_h1(self, t: Triple) -> int:
        """|H_1(M)| read from the surgery linking matrix (0 when infinite)."""
        if t.braid is None or not t.surgery:
            return 1
        closure = self._surgery_closure(t, {c: None for c in range(len(t.framings))})
        return linking_data(closure, t.surgery_components).abs_det
