"""
Verification suites: algebraic axioms, agreement of independent evaluation
paths, residues, symmetries, periodicities, the knot-surgery formula and
presentation independence. Each suite returns CheckReport objects.
"""

import itertools
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from qtop.config import Settings, get_settings
from qtop.models.job import SUITE_NAMES
from qtop.models.report import CheckReport
from qtop.services.errors import ContractError
from qtop.services.invariants import InvariantService, Triple, knot_surgery
from qtop.services.links import (
    KNOT_TABLE,
    BraidWord,
    ColoredBraidClosure,
    cable2,
    closure_components,
    conjugate,
    knot_table,
    stabilize,
)
from qtop.services.qcore import (
    QParams,
    delta_cgp,
    delta_so3,
    delta_table,
    mdim,
    qnum,
    quantum_integer,
    residue_mdim,
)
from qtop.services.reps import qdim, relation_residuals, simple_module, submodule_invariant, tau_module, typical_module
from qtop.services.ribbon import (
    braid_rmatrix_scaled,
    braiding,
    braiding_inverse_numeric,
    double_braiding,
    duality_vectors,
    twist_closed_form,
    twist_scalar,
    yang_baxter_residual,
)

logger = logging.getLogger(__name__)

Comparison = Tuple[str, complex, complex]

# Largest cabled strand count evaluated by the Temperley–Lieb path
MAX_SKEIN_STRANDS = 10


class VerificationService:
    """Runs the checks for one root of unity."""

    SUITES = SUITE_NAMES

    # Suites that evaluate 3-manifold invariants and so need r ∉ 4Z
    MANIFOLD_SUITES = {"deltas", "knot_theorem", "vanishing", "nr0_paths", "well_defined"}

    def __init__(self, params: QParams, settings: Optional[Settings] = None, seed: int = 7):
        self.params = params
        self.settings = settings or get_settings()
        self.invariants = InvariantService(params, self.settings)
        rng = np.random.default_rng(seed)
        self.samples = [complex(rng.uniform(0.1, 0.9), rng.uniform(-0.3, 0.3)) for _ in range(3)]

    def _richardson(self, sample: Callable[[float], complex]) -> complex:
        eps = self.settings.epsilon
        return (10 * sample(eps / 10) - sample(eps)) / 9

    def _knot(self, knot: str) -> BraidWord:
        braid = knot_table(knot)
        if closure_components(braid).count != 1:
            raise ContractError(f"{knot!r} is not a knot")
        return braid

    def _bracket(self, braid: BraidWord, module, framing: int = 0) -> complex:
        return self.invariants.bracket(ColoredBraidClosure(braid, (module,), (framing,), 0))

    def _jones(self, braid: BraidWord, n: int, notes: List[str]) -> complex:
        """J_n from the skein path, or the R-matrix path when the cable is too wide."""
        if n * braid.strands <= MAX_SKEIN_STRANDS:
            return self.invariants.jones_skein(braid, [n])
        notes.append(f"J_{n}: {n * braid.strands} cabled strands, R-matrix value used")
        return self.invariants.jones_rt(braid, [n])

    # ------------------------------------------------------------------ algebra

    def check_axioms(self) -> List[CheckReport]:
        p = self.params
        tol = self.settings.scalar_tol
        a1, a2, a3 = (typical_module(p, a) for a in self.samples)
        s1 = simple_module(p, 1)
        modules = [simple_module(p, n) for n in range(p.r)] + [a1, a2, a3, tau_module(p)]
        params = {"r": p.r, "alphas": [str(a) for a in self.samples]}
        reports = []

        relations: List[Comparison] = []
        for module in modules:
            for name, residual in relation_residuals(module).items():
                relations.append((f"{module.name}: {name}", residual, 0))
        for k in range(1, p.r):
            relations.append((f"V_{k} submodule v_{k}..v_{p.r - 1}", submodule_invariant(p, k), 0))
        reports.append(CheckReport.build("relations", params, relations, tol))

        dual: List[Comparison] = []
        for module in (s1, a1, tau_module(p)):
            data = duality_vectors(p, module)
            for name, residual in data.zigzag_residuals().items():
                dual.append((f"{module.name}: {name}", residual, 0))
            dual.append((f"{module.name}: d′∘b", data.loop_value(), qdim(module)))
            dual.append((f"{module.name}: d∘b′", data.dual_loop_value(), qdim(module)))
        dual.append((f"qdim {a1.name}", qdim(a1), 0))
        dual.append(("qdim S_1", qdim(s1), -p.q - 1 / p.q))
        reports.append(CheckReport.build("duality", params, dual, tol))

        braid_checks: List[Comparison] = []
        for left, right in ((a1, a2), (s1, a1), (s1, s1), (tau_module(p), a1)):
            forward = braiding(p, left, right, 1)
            backward = braiding(p, right, left, -1)
            residual = np.abs(forward.compose(backward).to_dense() - np.eye(left.dim * right.dim)).max()
            braid_checks.append((f"c∘c⁻¹ on {right.name}⊗{left.name}", residual, 0))
            closed = braiding(p, left, right, -1).to_dense()
            numeric = braiding_inverse_numeric(p, left, right)
            braid_checks.append((f"closed vs numeric c⁻¹ on {left.name}⊗{right.name}", np.abs(closed - numeric).max(), 0))
        tau = tau_module(p)
        braid_checks.append((
            f"double braiding τ⊗{a1.name}",
            double_braiding(p, tau, a1)[0, 0],
            p.qpow(p.r * (a1.label + p.r - 1)),
        ))
        reports.append(CheckReport.build("braiding", params, braid_checks, tol))

        ybe = [
            (f"{u.name},{v.name},{w.name}", yang_baxter_residual(p, u, v, w), 0)
            for u, v, w in ((a1, a2, a3), (s1, a1, a2), (a1, s1, s1))
        ]
        reports.append(CheckReport.build("yang_baxter", params, ybe, tol))

        c = braiding(p, s1, s1, 1).to_dense()
        c_inv = braiding(p, s1, s1, -1).to_dense()
        lhs = p.qpow(0.5) * c - p.qpow(-0.5) * c_inv
        residual = np.abs(lhs - qnum(p, 1) * np.eye(4)).max()
        reports.append(CheckReport.build("skein_relation", params, [("q^½c − q^-½c⁻¹ = {1}Id on S_1", residual, 0)], tol))

        twists: List[Comparison] = [
            (f"θ {m.name}", twist_scalar(p, m), twist_closed_form(p, m)) for m in modules
        ]
        reports.append(CheckReport.build("twists", params, twists, tol, relative=True))
        reports.append(self._ribbon_report(a1, a2, params))

        periodic: List[Comparison] = []
        for alpha in self.samples[:2]:
            for right in (a3, s1):
                base = braid_rmatrix_scaled(p, alpha, right)
                shifted = braid_rmatrix_scaled(p, alpha + 2 * p.r, right)
                scale = max(1.0, float(np.abs(base).max()))
                periodic.append((f"scaled c_(V_{alpha},{right.name}) at α+2r", np.abs(shifted - base).max() / scale, 0))
        reports.append(CheckReport.build("rmatrix_periodicity", params, periodic, tol))
        return reports

    def _ribbon_report(self, left, right, params: Dict) -> CheckReport:
        """Eigenvalues of θ_α θ_β c_{W,V} c_{V,W} are θ_{α+β+k}, k ∈ H_r, each r times."""
        p = self.params
        scaled = double_braiding(p, left, right) * twist_scalar(p, left) * twist_scalar(p, right)
        eigenvalues = np.linalg.eigvals(scaled)
        targets = [twist_closed_form(p, typical_module(p, left.label + right.label + k)) for k in range(1 - p.r, p.r, 2)]
        nearest = [int(np.argmin([abs(ev - t) for t in targets])) for ev in eigenvalues]
        comparisons: List[Comparison] = []
        for ev, index in zip(eigenvalues, nearest):
            comparisons.append((f"eigenvalue near θ_(α+β{2 * index + 1 - p.r:+d})", ev, targets[index]))
        counts = [nearest.count(i) for i in range(len(targets))]
        comparisons.append(("multiplicities", min(counts), p.r))
        comparisons.append(("multiplicities", max(counts), p.r))
        return CheckReport.build("ribbon", params, comparisons, 1e-6)

    def check_deltas(self) -> List[CheckReport]:
        p = self.params
        params = {"r": p.r}
        plus, minus = delta_cgp(p, 1), delta_cgp(p, -1)
        comparisons = [
            ("Δ_− vs closed form", minus, delta_table(p)),
            ("Δ_+ vs conj Δ_−", plus, minus.conjugate()),
            ("Δ_+ vs {1}rΔ^SO3_+", plus, qnum(p, 1) * p.r * delta_so3(p, 1)),
            ("Δ^SO3_− vs conj Δ^SO3_+", delta_so3(p, -1), delta_so3(p, 1).conjugate()),
            ("Δ_+Δ_− real positive", plus * minus, abs(plus * minus)),
        ]
        return [CheckReport.build("deltas", params, comparisons, self.settings.scalar_tol, relative=True)]

    # ------------------------------------------------------------------ link invariants

    def check_jones_paths(self, knots: Optional[Sequence[str]] = None) -> List[CheckReport]:
        p = self.params
        knots = list(knots or KNOT_TABLE)
        comparisons: List[Comparison] = []
        notes = []
        for name in knots:
            braid = knot_table(name)
            data = closure_components(braid)
            sizes = [len(c) for c in data.components]
            for colors in itertools.product(range(p.r), repeat=data.count):
                cabled = sum(n * s for n, s in zip(colors, sizes))
                if cabled > MAX_SKEIN_STRANDS:
                    notes.append(f"{name} {list(colors)}: {cabled} cabled strands, skein path skipped")
                    continue
                rt = self.invariants.jones_rt(braid, colors)
                skein = self.invariants.jones_skein(braid, colors)
                comparisons.append((f"{name} colors={list(colors)}", rt, skein))
        unknot = knot_table("unknot")
        for n in range(p.r):
            comparisons.append((f"unknot J_{n} = (−1)^n[n+1]", self.invariants.jones_rt(unknot, [n]), (-1) ** n * quantum_integer(p, n + 1)))
        return [CheckReport.build("jones_paths", {"r": p.r, "knots": knots}, comparisons, self.settings.tol, relative=True, notes=notes)]

    def check_residue(self, knot: str = "trefoil", ns: Optional[Sequence[int]] = None) -> List[CheckReport]:
        """ε·F′(K_{n+ε}) → ±(r/π) sin(π/r) J_{r−1∓k}(K) as ε → 0."""
        p = self.params
        braid = self._knot(knot)
        ns = list(ns) if ns is not None else [n for n in range(1 - p.r, p.r) if n != 0]
        factor = p.r / math.pi * math.sin(math.pi / p.r)
        comparisons: List[Comparison] = []
        notes: List[str] = []
        for n in ns:
            if n % p.r == 0:
                raise ContractError(f"{n} is a multiple of r; there is no pole")
            k = (n + p.r) % (2 * p.r) - p.r

            def sample(eps: float, n=n) -> complex:
                alpha = n + eps
                return eps * mdim(p, alpha) * self._bracket(braid, typical_module(p, alpha))

            if k > 0:
                expected = factor * self._jones(braid, p.r - 1 - k, notes)
            else:
                expected = -factor * self._jones(braid, p.r - 1 + k, notes)
            comparisons.append((f"residue of F′({knot}) at {n}", self._richardson(sample), expected))
            comparisons.append((f"residue of d at {n}", self._richardson(lambda eps, n=n: eps * mdim(p, n + eps)), residue_mdim(p, n)))
        return [CheckReport.build("residue", {"r": p.r, "knot": knot, "n": ns}, comparisons, self.settings.residue_tol, relative=True, notes=notes)]

    def check_symmetry(self, knot: str = "trefoil") -> List[CheckReport]:
        p = self.params
        r = p.r
        braid = self._knot(knot)
        comparisons: List[Comparison] = []
        for k in range(r):
            comparisons.append((f"⟨T_V{k}⟩ = ⟨T_S{r - 1 - k}⟩",
                                self._bracket(braid, typical_module(p, k)), self._bracket(braid, simple_module(p, r - 1 - k))))
        for j in range(1 - r, 1):
            comparisons.append((f"⟨T_V{j}⟩ = ⟨T_S{r - 1 + j}⟩",
                                self._bracket(braid, typical_module(p, j)), self._bracket(braid, simple_module(p, r - 1 + j))))
        for k in range(r):
            comparisons.append((f"⟨T_V{k + r}⟩ = ⟨T_V{k}⟩",
                                self._bracket(braid, typical_module(p, k + r)), self._bracket(braid, typical_module(p, k))))
        for k in range(1, r):
            comparisons.append((f"⟨T_S{k - 1}⟩ = ⟨T_S{r - 1 - k}⟩",
                                self._bracket(braid, simple_module(p, k - 1)), self._bracket(braid, simple_module(p, r - 1 - k))))
        return [CheckReport.build("symmetry", {"r": r, "knot": knot}, comparisons, self.settings.scalar_tol, relative=True)]

    def check_periodicity(self, knot: str = "trefoil", framings: Sequence[int] = (-1, 0, 1, 2)) -> List[CheckReport]:
        p = self.params
        r = p.r
        braid = self._knot(knot)
        comparisons: List[Comparison] = []
        for alpha in self.samples[:2]:
            comparisons.append((f"⟨T⁰_V(α+r)⟩ at α={alpha}",
                                self._bracket(braid, typical_module(p, alpha + r)), self._bracket(braid, typical_module(p, alpha))))
            for f in framings:
                base = self.invariants.knot_fprime(braid, f, alpha)
                comparisons.append((f"F′(K^{f}) at α+2r, α={alpha}",
                                    self.invariants.knot_fprime(braid, f, alpha + 2 * r), p.qpow(2 * r * alpha * f) * base))
                comparisons.append((f"F′(K^{f}) at α+r, α={alpha}",
                                    self.invariants.knot_fprime(braid, f, alpha + r),
                                    (-1) ** (r + 1) * (1j * p.qpow(alpha)) ** (r * f) * base))
        return [CheckReport.build("periodicity", {"r": r, "knot": knot, "framings": list(framings)}, comparisons, 1e-7, relative=True)]

    # ------------------------------------------------------------------ 3-manifold invariants

    def check_knot_theorem(self, knot: str = "trefoil", framings: Sequence[int] = (-2, -1, 1, 2)) -> List[CheckReport]:
        """
        N⁰_r(S³_f(K), ω) = |f|·WRT_r(S³_f(K), ω) for every class ω.

        ω = 1 is a class on S³_f(K) only for even f.
        """
        braid = self._knot(knot)
        comparisons: List[Comparison] = []
        for f in framings:
            for omega in (0, 1) if f % 2 == 0 else (0,):
                triple = knot_surgery(braid, f, omega)
                comparisons.append((f"{knot} f={f} ω={omega}",
                                    self.invariants.nr0_knot(braid, f, omega), abs(f) * self.invariants.wrt(triple)))
                comparisons.append((f"|H_1| for f={f}", self.invariants.ord_h1(triple), abs(f)))
        return [CheckReport.build("knot_theorem", {"r": self.params.r, "knot": knot, "framings": list(framings)},
                                  comparisons, self.settings.scalar_tol, relative=True)]

    def check_nr0_paths(self, knot: str = "trefoil") -> List[CheckReport]:
        p = self.params
        braid = self._knot(knot)
        second_alpha = complex(0.217, 0.05)
        comparisons: List[Comparison] = []
        for f, omega in ((1, 0), (-1, 1), (2, 1), (-2, 0)):
            direct = self.invariants.nr0_knot(braid, f, omega)
            for alpha in (None, second_alpha):
                label = "default α" if alpha is None else f"α={alpha}"
                comparisons.append((f"cabled f={f} ω={omega} {label}",
                                    self.invariants.nr0_knot_cabled(braid, f, omega, alpha), direct))
        alpha, beta = self.samples[0], self.samples[1]
        writhe = closure_components(braid).self_writhe[0]
        doubled = ColoredBraidClosure(cable2(braid, 1 - writhe), (typical_module(p, alpha), typical_module(p, beta)), (1, 1), 0)
        comparisons.append(("F′(DK(V_α,V_β)) = P(α+β)", self.invariants.f_prime(doubled),
                            self.invariants.p_function(braid, 1, alpha + beta)))
        report = CheckReport.build("nr0_paths", {"r": p.r, "knot": knot}, comparisons, 1e-7, relative=True)

        limits: List[Comparison] = []
        for f, omega in ((1, 0), (-1, 1)):
            limits.append((f"ε-limit f={f} ω={omega}", self.invariants.nr0_knot_limit(braid, f, omega),
                           self.invariants.nr0_knot(braid, f, omega)))
        limit_report = CheckReport.build("nr0_limit", {"r": p.r, "knot": knot}, limits, self.settings.residue_tol,
                                         relative=True)
        return [report, limit_report]

    def check_vanishing_f0(self, knot: str = "trefoil") -> List[CheckReport]:
        """0-surgery has b₁ = 1, so the ε-limit of the N⁰ sum must vanish."""
        comparisons: List[Comparison] = []
        names = [knot] if knot == "unknot" else ["unknot", knot]
        for name in names:
            braid = self._knot(name)
            for omega in (0, 1):
                comparisons.append((f"{name} f=0 ω={omega}", self.invariants.nr0_knot_limit(braid, 0, omega), 0))
        return [CheckReport.build("vanishing", {"r": self.params.r, "knots": names}, comparisons, 1e-6)]

    def check_well_defined(self, knot: str = "trefoil") -> List[CheckReport]:
        """Invariants agree on Markov-equivalent words and across Kirby-color lifts."""
        p = self.params
        braid = self._knot(knot)
        variants = {"stabilized": stabilize(braid, 1), "conjugated": conjugate(braid, 1) if braid.strands > 1 else braid}
        alpha = self.samples[0]
        comparisons: List[Comparison] = []
        notes = []
        for label, other in variants.items():
            for f in (0, 1):
                comparisons.append((f"F′ {label} f={f}", self.invariants.knot_fprime(other, f, alpha),
                                    self.invariants.knot_fprime(braid, f, alpha)))
            for n in range(1, p.r):
                comparisons.append((f"J_{n} {label}", self.invariants.jones_rt(other, [n]), self.invariants.jones_rt(braid, [n])))
            comparisons.append((f"WRT f=1 {label}", self.invariants.wrt(knot_surgery(other, 1)),
                                self.invariants.wrt(knot_surgery(braid, 1))))
            comparisons.append((f"N⁰ f=1 {label}", self.invariants.nr0_knot(other, 1, 0), self.invariants.nr0_knot(braid, 1, 0)))
            if p.r ** (2 * max(other.strands, braid.strands)) <= self.settings.scalar_check_max_dim:
                comparisons.append((f"cabled N⁰ f=1 {label}", self.invariants.nr0_knot_cabled(other, 1, 0),
                                    self.invariants.nr0_knot_cabled(braid, 1, 0)))
            else:
                notes.append(f"cabled N⁰ on the {label} word skipped: product space too large")

        beta = 0.37
        lift = 1 - p.r - beta
        hopf = knot_table("hopf")
        lifts = []
        for shift in (0, 2):
            triple = Triple(braid=hopf, framings=(1, 0), surgery={0: complex(lift + shift)},
                            cargo={1: typical_module(p, beta)})
            lifts.append(self.invariants.nr(triple, canonical_lift=False))
        comparisons.append((f"N_r Kirby lift α vs α+2 (β={beta})", lifts[1], lifts[0]))
        return [CheckReport.build("well_defined", {"r": p.r, "knot": knot}, comparisons, 1e-7, relative=True, notes=notes)]

    # ------------------------------------------------------------------ dispatch

    def run_suite(self, name: str, knot: str = "trefoil") -> List[CheckReport]:
        if name not in self.SUITES:
            raise ContractError(f"unknown suite {name!r}; available: {', '.join(self.SUITES)}")
        if name in self.MANIFOLD_SUITES and not self.params.manifold_ok:
            return [CheckReport.skip(name, {"r": self.params.r}, "3-manifold constants need r not divisible by 4")]
        logger.info("running suite %s for r=%d", name, self.params.r)
        runners: Dict[str, Callable[[], List[CheckReport]]] = {
            "axioms": self.check_axioms,
            "deltas": self.check_deltas,
            "jones_paths": self.check_jones_paths,
            "residue": lambda: self.check_residue(knot),
            "symmetry": lambda: self.check_symmetry(knot),
            "periodicity": lambda: self.check_periodicity(knot),
            "knot_theorem": lambda: self.check_knot_theorem(knot),
            "vanishing": lambda: self.check_vanishing_f0(knot),
            "nr0_paths": lambda: self.check_nr0_paths(knot),
            "well_defined": lambda: self.check_well_defined(knot),
        }
        reports = runners[name]()
        for report in reports:
            if not report.passed:
                worst = report.worst
                logger.warning("check %s failed: max error %.3e at %s", report.name, report.max_abs_error,
                               worst.input if worst else "-")
        return reports

    def run_all(self, knot: str = "trefoil") -> List[CheckReport]:
        reports: List[CheckReport] = []
        for name in self.SUITES:
            reports.extend(self.run_suite(name, knot))
        return reports
