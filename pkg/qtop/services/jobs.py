"""
Executes JobSpec requests. The CLI and the HTTP routers both go through
JobRunner so that inputs are interpreted the same way on both surfaces.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

from qtop.config import Settings, get_settings
from qtop.models.job import Command, JobSpec, JonesMethod, LinkInput, Nr0Path
from qtop.models.report import complex_pair
from qtop.services.errors import ContractError, NumericalError, ParseError
from qtop.services.invariants import InvariantService, Triple, knot_surgery
from qtop.services.links import BraidWord, ColoredBraidClosure, closure_from_json, knot_table, parse_braid
from qtop.services.qcore import QParams
from qtop.services.reps import module_from_label, parse_complex, typical_module
from qtop.services.verify import VerificationService

logger = logging.getLogger(__name__)


def resolve_link(p: QParams, spec: LinkInput) -> Tuple[BraidWord, Optional[ColoredBraidClosure]]:
    """The braid named by the input, plus the full closure when JSON was given."""
    if spec.link is not None:
        closure = closure_from_json(p, spec.link)
        return closure.braid, closure
    if spec.braid:
        return parse_braid(spec.braid), None
    if spec.knot:
        return knot_table(spec.knot), None
    raise ParseError("no link given: pass a braid, a knot name or a JSON link")


def _int_colors(colors: List[str]) -> List[int]:
    try:
        return [int(c) for c in colors]
    except ValueError:
        raise ParseError(f"colored Jones colors must be integers, got {colors}")


class JobRunner:
    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def run(self, spec: JobSpec) -> Dict[str, Any]:
        """
        Runs one job.

        Returns:
            JSON-ready dictionary; complex numbers are [re, im] pairs.
        """
        p = QParams(r=spec.r)
        handlers = {
            Command.JONES: self._jones,
            Command.ADO: self._ado,
            Command.NR0: self._nr0,
            Command.WRT: self._manifold,
            Command.NR: self._manifold,
            Command.VERIFY: self._verify,
        }
        logger.info("running %s for r=%d", spec.command.value, spec.r)
        result = handlers[spec.command](p, spec)
        return {"command": spec.command.value, "r": spec.r, **result}

    def _framings(self, spec: JobSpec, closure: Optional[ColoredBraidClosure]) -> Tuple[int, ...]:
        if spec.framings:
            return tuple(spec.framings)
        return closure.framings if closure is not None else ()

    def _jones(self, p: QParams, spec: JobSpec) -> Dict[str, Any]:
        braid, closure = resolve_link(p, spec)
        colors = _int_colors(spec.colors)
        framings = self._framings(spec, closure)
        service = InvariantService(p, self.settings)
        if spec.method is JonesMethod.RT:
            return {"value": complex_pair(service.jones_rt(braid, colors, framings)), "path": "rt"}
        if spec.method is JonesMethod.SKEIN:
            return {"value": complex_pair(service.jones_skein(braid, colors, framings)), "path": "skein"}
        rt = service.jones_rt(braid, colors, framings)
        skein = service.jones_skein(braid, colors, framings)
        deviation = abs(rt - skein) / max(1.0, abs(rt))
        if deviation > self.settings.tol:
            raise NumericalError(f"R-matrix and skein paths disagree: {rt} vs {skein} (relative {deviation:.3e})")
        return {"value": complex_pair(rt), "path": "both", "rt": complex_pair(rt), "skein": complex_pair(skein),
                "deviation": deviation}

    def _ado(self, p: QParams, spec: JobSpec) -> Dict[str, Any]:
        braid, closure = resolve_link(p, spec)
        framings = self._framings(spec, closure)
        service = InvariantService(p, self.settings)
        if spec.alphas:
            samples = []
            for text in spec.alphas:
                alpha = parse_complex(text)
                colored = ColoredBraidClosure(braid, (typical_module(p, alpha),), framings, 0)
                samples.append({"alpha": complex_pair(alpha), "value": complex_pair(service.f_prime(colored))})
            if len(samples) == 1:
                return {"value": samples[0]["value"], "alpha": samples[0]["alpha"]}
            return {"samples": samples}

        if spec.colors:
            colors = tuple(module_from_label(p, c) for c in spec.colors)
        elif closure is not None and all(c is not None for c in closure.colors):
            colors = closure.colors
        else:
            raise ContractError("F′ needs colors: pass color labels or alphas")
        cut = closure.cut if closure is not None else None
        colored = ColoredBraidClosure(braid, colors, framings, cut)
        return {"value": complex_pair(service.f_prime(colored)), "colors": [m.name for m in colors]}

    def _nr0(self, p: QParams, spec: JobSpec) -> Dict[str, Any]:
        braid, _ = resolve_link(p, spec)
        if spec.f is None:
            raise ContractError("N⁰ of knot surgery needs the framing f")
        service = InvariantService(p, self.settings)
        if spec.path is Nr0Path.CABLED:
            alpha = parse_complex(spec.alpha) if spec.alpha else None
            value = service.nr0_knot_cabled(braid, spec.f, spec.omega, alpha)
        elif spec.path is Nr0Path.LIMIT:
            value = service.nr0_knot_limit(braid, spec.f, spec.omega)
        else:
            value = service.nr0_knot(braid, spec.f, spec.omega)
        return {"value": complex_pair(value), "invariant": "nr0", "path": spec.path.value,
                "f": spec.f, "omega": spec.omega}

    def _triple(self, p: QParams, spec: JobSpec) -> Triple:
        braid, closure = resolve_link(p, spec)
        if not spec.surgery and not spec.cargo:
            if spec.f is None:
                raise ContractError("knot surgery needs the framing f")
            return knot_surgery(braid, spec.f, spec.omega)
        return Triple(
            braid=braid,
            framings=self._framings(spec, closure),
            surgery={c: parse_complex(g) for c, g in spec.surgery.items()},
            cargo={c: module_from_label(p, label) for c, label in spec.cargo.items()},
        )

    def _manifold(self, p: QParams, spec: JobSpec) -> Dict[str, Any]:
        triple = self._triple(p, spec)
        service = InvariantService(p, self.settings)
        if spec.command is Command.WRT:
            value = service.wrt(triple)
        else:
            value = service.nr(triple)
        return {"value": complex_pair(value), "invariant": spec.command.value, "ord_h1": service.ord_h1(triple)}

    def _verify(self, p: QParams, spec: JobSpec) -> Dict[str, Any]:
        service = VerificationService(p, self.settings)
        knot = spec.knot or "trefoil"
        reports = service.run_all(knot) if spec.suite == "all" else service.run_suite(spec.suite, knot)
        return {
            "passed": all(r.passed for r in reports),
            "reports": [r.model_dump(by_alias=True) for r in reports],
        }
