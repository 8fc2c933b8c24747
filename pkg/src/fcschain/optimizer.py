"""Maximization of nearest-neighbour concurrence over the angle parametrization.

The search is a Corana/Goffe simulated annealing run on the periodic box
``[0, 2 pi)^dim`` followed by BFGS ascent with central-difference gradients.
A final perturbation stage (``polish``) kicks the refined point at random
and re-runs BFGS, keeping only improvements; for b >= 6 the refined annealing
output often sits on a ridge below the best nearby maximum.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import entanglement as ent
from .errors import AllStartsFailed, SolveFailed
from .fcs import partial_trace, reduced_density, solve_invariant_state, next_nearest
from .parametrization import ParameterVector, bloch_length_sq, build_pair

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class AnnealingConfig:
    """Control knobs of the annealing run.

    ``nt * ns * dim`` moves are made at each temperature; step widths are
    re-tuned every ``ns * dim`` moves.  The run stops once the final value at
    the last ``neps`` temperatures and the best value agree within ``eps``.
    """

    nt: int = 20
    ns: int = 10
    rt: float = 0.75
    neps: int = 5
    eps: float = 1e-10
    t0: float = 1.0
    max_evals: int = 5_000_000
    seed: int = 0
    step0: float = math.pi
    complex_r: bool = False
    non_nilpotent: bool = False
    hops: int = 20
    hop_scales: tuple = (0.05, 0.1, 0.2, 0.4)
    hop_fraction: float = 0.4

    def __post_init__(self):
        if not 0 < self.rt < 1:
            raise ValueError(f"rt must lie in (0, 1), got {self.rt}")
        if self.eps <= 0 or self.t0 <= 0 or self.step0 <= 0:
            raise ValueError("eps, t0 and step0 must be positive")
        if min(self.nt, self.ns, self.neps, self.max_evals) < 1:
            raise ValueError("nt, ns, neps and max_evals must be >= 1")
        if self.hops < 0 or not 0 < self.hop_fraction <= 1 or not self.hop_scales:
            raise ValueError("hops must be >= 0, hop_fraction in (0, 1], hop_scales non-empty")
        object.__setattr__(self, "hop_scales", tuple(float(v) for v in self.hop_scales))


@dataclass
class OptimizationResult:
    params: ParameterVector
    concurrence: float
    assistance: float
    elements: tuple
    purity12: float
    purity1: float
    purity123: float
    bloch_length_sq: float
    next_nearest_concurrence: float
    evals: int = 0
    converged: bool = False
    line_search_failed: bool = False
    seed: Optional[int] = None
    trace: list = field(default_factory=list)
    runs: list = field(default_factory=list)


# --- objective -------------------------------------------------------------


def nearest_neighbour_state(params: ParameterVector) -> np.ndarray:
    pair = build_pair(params)
    state = solve_invariant_state(pair)
    return reduced_density(pair, state, 2).rho


def objective(params: ParameterVector) -> float:
    """Concurrence of the nearest-neighbour state; raises ``SolveFailed``."""
    return ent.concurrence(nearest_neighbour_state(params))


def flat_objective(b: int, complex_r: bool = False, non_nilpotent: bool = False) -> Callable[[np.ndarray], float]:
    def f(x):
        return objective(ParameterVector.from_flat(b, x, complex_r, non_nilpotent))

    return f


def diagnose(params: ParameterVector, **extra) -> OptimizationResult:
    """Evaluate every reported property of the chain at ``params``."""
    pair = build_pair(params)
    state = solve_invariant_state(pair)
    rho3 = reduced_density(pair, state, 3)
    rho12 = partial_trace(rho3, [1, 2]).rho
    rho1 = partial_trace(rho3, [1]).rho
    spec = ent.concurrence_spectrum(rho12)
    return OptimizationResult(
        params=params,
        concurrence=spec.concurrence,
        assistance=spec.assistance,
        elements=ent.abc_elements(rho12),
        purity12=ent.purity(rho12),
        purity1=ent.purity(rho1),
        purity123=ent.purity(rho3.rho),
        bloch_length_sq=bloch_length_sq(state.rho),
        next_nearest_concurrence=ent.concurrence(next_nearest(pair, state).rho),
        **extra,
    )


# --- simulated annealing ---------------------------------------------------


def _safe(f, x):
    try:
        v = f(x)
    except SolveFailed:
        return None
    return v if np.isfinite(v) else None


def anneal(f, x0, config: AnnealingConfig, rng: np.random.Generator):
    """Maximize ``f`` over the periodic box starting from ``x0``.

    Returns ``(xopt, fopt, evals, converged, trace)``.  Evaluations raising
    ``SolveFailed`` count as rejected moves.
    """
    n = x0.size
    x = np.mod(np.array(x0, dtype=float), TWO_PI)
    fx = _safe(f, x)
    evals = 1
    while fx is None:
        x = rng.uniform(0.0, TWO_PI, n)
        fx = _safe(f, x)
        evals += 1
        if evals >= config.max_evals:
            return x, -np.inf, evals, False, []
    xopt, fopt = x.copy(), fx
    trace = [(evals, fopt)]
    vm = np.full(n, config.step0)
    c = 2.0
    fstar = [np.inf] * config.neps
    t = config.t0

    while True:
        for _ in range(config.nt):
            nacp = np.zeros(n, dtype=int)
            for _ in range(config.ns):
                for h in range(n):
                    if evals >= config.max_evals:
                        return xopt, fopt, evals, False, trace
                    xp = x.copy()
                    xp[h] = (x[h] + rng.uniform(-1.0, 1.0) * vm[h]) % TWO_PI
                    fp = _safe(f, xp)
                    evals += 1
                    u = rng.uniform()
                    if fp is None:
                        continue
                    if fp >= fx or u < math.exp((fp - fx) / t):
                        x, fx = xp, fp
                        nacp[h] += 1
                        if fx > fopt:
                            xopt, fopt = x.copy(), fx
                            trace.append((evals, fopt))
            ratio = nacp / config.ns
            hi, lo = ratio > 0.6, ratio < 0.4
            vm[hi] *= 1.0 + c * (ratio[hi] - 0.6) / 0.4
            vm[lo] /= 1.0 + c * (0.4 - ratio[lo]) / 0.4
            np.minimum(vm, TWO_PI, out=vm)

        fstar[0] = fx
        done = fopt - fstar[0] <= config.eps and all(abs(fx - s) <= config.eps for s in fstar)
        if done:
            return xopt, fopt, evals, True, trace
        t *= config.rt
        fstar = [fx] + fstar[:-1]
        x, fx = xopt.copy(), fopt
        log.debug("T=%.3e best=%.12f evals=%d", t, fopt, evals)


def simulated_annealing(b: int, config: AnnealingConfig = AnnealingConfig()) -> OptimizationResult:
    rng = np.random.default_rng(config.seed)
    dim = ParameterVector.dimension(b, config.complex_r, config.non_nilpotent)
    f = flat_objective(b, config.complex_r, config.non_nilpotent)
    x0 = rng.uniform(0.0, TWO_PI, dim)
    x, fx, evals, converged, trace = anneal(f, x0, config, rng)
    params = ParameterVector.from_flat(b, x, config.complex_r, config.non_nilpotent)
    if not np.isfinite(fx):
        raise SolveFailed(f"no valid starting point found in {evals} evaluations")
    return diagnose(params, evals=evals, converged=converged, seed=config.seed, trace=trace)


# --- gradient refinement ---------------------------------------------------


def _central_gradient(f, x, h):
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def numerical_gradient(params: ParameterVector, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of the objective in flat-parameter order."""
    f = flat_objective(params.b, params.complex_r, params.non_nilpotent)
    return _central_gradient(f, params.flat(), h)


def bfgs_ascent(f, x0, fx0=None, max_iters=200, gtol=1e-7, h=1e-6):
    """Quasi-Newton ascent with backtracking (Armijo) line search.

    Returns ``(x, fx, evals, converged, line_search_failed)``; the returned
    value is never below ``f(x0)``.
    """
    x = np.array(x0, dtype=float)
    fx = f(x) if fx0 is None else fx0
    evals = 0 if fx0 is not None else 1
    n = x.size
    hinv = np.eye(n)
    try:
        g = _central_gradient(f, x, h)
    except SolveFailed:
        return x, fx, evals + 2 * n, False, True
    evals += 2 * n
    for _ in range(max_iters):
        if np.linalg.norm(g) <= gtol:
            return x, fx, evals, True, False
        d = hinv @ g
        slope = d @ g
        if slope <= 0:
            hinv = np.eye(n)
            d, slope = g, g @ g
        step = 1.0
        accepted = False
        while step * np.linalg.norm(d) > 1e-15 * max(1.0, np.linalg.norm(x)):
            fn = _safe(f, x + step * d)
            evals += 1
            if fn is not None and fn >= fx + 1e-4 * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            if not np.allclose(hinv, np.eye(n)):
                hinv = np.eye(n)
                continue
            return x, fx, evals, False, True
        s = step * d
        xn = x + s
        try:
            gn = _central_gradient(f, xn, h)
        except SolveFailed:
            return x, fx, evals + 2 * n, False, True
        evals += 2 * n
        # curvature pair for minimizing -f
        y = g - gn
        sy = s @ y
        if sy > 1e-14:
            rho = 1.0 / sy
            v = np.eye(n) - rho * np.outer(s, y)
            hinv = v @ hinv @ v.T + rho * np.outer(s, s)
        x, fx, g = xn, fn, gn
    return x, fx, evals, False, False


def refine(start: OptimizationResult, max_iters: int = 200, gtol: float = 1e-7, h: float = 1e-6) -> OptimizationResult:
    p = start.params
    f = flat_objective(p.b, p.complex_r, p.non_nilpotent)
    x, fx, evals, converged, failed = bfgs_ascent(f, p.flat(), start.concurrence, max_iters, gtol, h)
    if fx <= start.concurrence:
        return replace(start, evals=start.evals + evals, line_search_failed=failed)
    params = ParameterVector.from_flat(p.b, x, p.complex_r, p.non_nilpotent)
    trace = list(start.trace) + [(start.evals + evals, fx)]
    return diagnose(
        params,
        evals=start.evals + evals,
        converged=converged,
        line_search_failed=failed,
        seed=start.seed,
        trace=trace,
    )


# --- multi-start -----------------------------------------------------------


def polish(start: OptimizationResult, config: AnnealingConfig, max_iters: int = 200) -> OptimizationResult:
    """Perturb-and-refine hops around ``start``; never returns a lower value.

    Each hop adds Gaussian noise (scale drawn from ``config.hop_scales``) to a
    random ``hop_fraction`` of the coordinates and runs BFGS from there.  The
    random stream is derived from ``config.seed`` so results are reproducible.
    """
    p = start.params
    f = flat_objective(p.b, p.complex_r, p.non_nilpotent)
    rng = np.random.default_rng([config.seed, 1])
    x, fx = p.flat(), start.concurrence
    evals, trace, improved = start.evals, list(start.trace), False
    for _ in range(config.hops):
        scale = config.hop_scales[rng.integers(len(config.hop_scales))]
        mask = rng.random(x.size) < config.hop_fraction
        y = x + mask * rng.normal(0.0, scale, x.size)
        fy0 = _safe(f, y)
        evals += 1
        if fy0 is None:
            continue
        y, fy, n, _, _ = bfgs_ascent(f, y, fy0, max_iters=max_iters)
        evals += n
        if fy > fx + 1e-12:
            x, fx, improved = y, fy, True
            trace.append((evals, fx))
    if not improved:
        return replace(start, evals=evals)
    params = ParameterVector.from_flat(p.b, np.mod(x, TWO_PI), p.complex_r, p.non_nilpotent)
    return diagnose(
        params,
        evals=evals,
        converged=start.converged,
        line_search_failed=start.line_search_failed,
        seed=start.seed,
        trace=trace,
    )


def single_run(b: int, config: AnnealingConfig, max_iters: int = 200) -> OptimizationResult:
    """Annealing, then BFGS refinement, then ``config.hops`` perturbation hops."""
    return polish(refine(simulated_annealing(b, config), max_iters=max_iters), config, max_iters)


def _run_or_error(args):
    b, config, max_iters = args
    try:
        return single_run(b, config, max_iters)
    except Exception as exc:  # reported per start, aggregated below
        return exc


def multi_start(
    b: int,
    config: AnnealingConfig = AnnealingConfig(),
    n_starts: int = 8,
    workers: int = 1,
    max_iters: int = 200,
) -> OptimizationResult:
    """Best of ``n_starts`` annealing + refinement runs with seeds ``seed + i``.

    Ties go to the lowest seed, so the result does not depend on ``workers``.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    jobs = [(b, replace(config, seed=config.seed + i), max_iters) for i in range(n_starts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_or_error, jobs))
    else:
        outcomes = [_run_or_error(j) for j in jobs]

    best = None
    runs = []
    for (_, cfg, _), out in zip(jobs, outcomes):
        if isinstance(out, Exception):
            runs.append({"seed": cfg.seed, "error": type(out).__name__})
            continue
        runs.append({"seed": cfg.seed, "concurrence": out.concurrence, "evals": out.evals, "converged": out.converged})
        if best is None or out.concurrence > best.concurrence:
            best = out
    if best is None:
        raise AllStartsFailed(f"all {n_starts} starts failed: {runs}")
    best.runs = runs
    return best


def config_dict(config: AnnealingConfig) -> dict:
    return asdict(config)
