"""Dispatch from an :class:`ExperimentConfig` to the numerical modules."""

from __future__ import annotations

import math
import time

import numpy as np

from .. import __version__, automorphic, flows, heegner, hecke, periods, sl2
from .config import ExperimentConfig
from .report import Report, Row, value_rows


class ExperimentError(RuntimeError):
    pass


def _basepoint(name: str):
    return sl2.IDENTITY if name == "identity" else flows.GENERIC_BASEPOINT


def _discrepancy_rows(rep: flows.DiscrepancyReport) -> list[Row]:
    rows = []
    floor = rep.above_floor()
    for i, name in enumerate(rep.names):
        rows.append(Row(name, "deviation", float(rep.deviations[i]), float(rep.combined_errors()[i]), rep.orbit_size))
        rows.append(Row(name, "reference_error", float(rep.reference_errors[i]), None, None))
        rows.append(Row(name, "above_floor", float(floor[i]), None, None))
    rows.append(Row("suite", "max_deviation", rep.max_deviation, None, rep.orbit_size))
    return rows


def _horocycle(cfg, p, workers):
    suite = flows.default_suite(cfg.seed, p["suite_n"])
    spec = flows.OrbitSpec.continuous(p["T"], p["nodes"], _basepoint(p["basepoint"]))
    rep = flows.discrepancy(flows.orbit_points(spec), suite)
    return _discrepancy_rows(rep), {}, {"nodes": spec.nodes}


def _sparse(cfg, p, workers):
    suite = flows.default_suite(cfg.seed, p["suite_n"])
    spec = flows.OrbitSpec.sparse(p["gamma"], p["N"], _basepoint(p["basepoint"]))
    rep = flows.discrepancy(flows.orbit_points(spec), suite)
    return _discrepancy_rows(rep), {}, {}


def _rational(cfg, p, workers):
    suite = flows.default_suite(cfg.seed, p["suite_n"])
    y = p["y"] if p["y"] is not None else 1.0 / p["q"]
    rep = flows.discrepancy(flows.rational_horocycle_points(p["q"], y), suite)
    return _discrepancy_rows(rep), {}, {"y": y}


def _hecke_orbit(cfg, p, workers):
    suite = flows.default_suite(cfg.seed, p["suite_n"])
    pts = hecke.hecke_points(sl2.Point(p["x"], p["y"]), p["n"])
    rep = flows.discrepancy(pts, suite)
    return _discrepancy_rows(rep), {}, {"orbit_size": int(pts.size)}


def _matrix_coefficient(cfg, p, workers):
    f = flows.bump(complex(p["center_x"], p["center_y"]), p["radius"])
    mc = flows.matrix_coefficient(f, f, p["t"], p["n"], cfg.seed, normalize=True, workers=workers)
    rows = value_rows("bump", "normalized_correlation", mc.estimate, mc.stderr, mc.n)
    return rows, {}, {}


def sample_eisenstein_args(seed: int, count: int):
    """(s, z) pairs with Re s in [0.3, 0.7], |Im s| <= 5 and reduced z with y <= 10."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(7,))))
    s = rng.uniform(0.3, 0.7, count) + 1j * rng.uniform(-5, 5, count)
    z = np.empty(count, dtype=complex)
    filled = 0
    while filled < count:
        x = rng.uniform(-0.5, 0.5)
        y = rng.uniform(sl2.ROOT3_2, 10.0)
        if x * x + y * y >= 1:
            z[filled] = complex(x, y)
            filled += 1
    return s, z


def _eisenstein(cfg, p, workers):
    s, z = sample_eisenstein_args(cfg.seed, p["samples"])
    res = [abs(automorphic.eval_eisenstein_star(si, zi) - automorphic.eval_eisenstein_star(1 - si, zi)) for si, zi in zip(s, z)]
    worst = float(max(res))
    zs = z[:10]
    spreads = [automorphic.eisenstein_residue_check(zs, e) for e in (1e-2, 5e-3)]
    ratio = spreads[0] / spreads[1]
    rows = [Row("E*", "max_functional_equation_residual", worst, None, len(res)),
            Row("E*", "residue_spread_eps_1e-2", spreads[0], None, len(zs)),
            Row("E*", "residue_spread_eps_5e-3", spreads[1], None, len(zs)),
            Row("E*", "residue_spread_ratio", ratio, None, len(zs))]
    checks = {"functional_equation": worst < p["tol"], "residue_ratio": 1.5 <= ratio <= 2.5}
    return rows, checks, {}


def _fourier(cfg, p, workers):
    f = automorphic.CuspFormSeries.delta()
    rows, worst = [], 0.0
    for n in range(1, p["n_max"] + 1):
        a = periods.fourier_coeff_via_horocycle(f, n)
        rel = abs(a - f.a(n)) / abs(f.a(n))
        worst = max(worst, rel)
        rows.append(Row(f"a({n})", "relative_error", rel, None, max(64, 8 * n)))
    return rows, {"relative_error": worst < p["tol"]}, {"max_relative_error": worst}


def _twisted(cfg, p, workers):
    f = automorphic.CuspFormSeries.delta()
    chi = periods.DirichletCharacter.quadratic(p["q"]) if p["index"] is None else periods.DirichletCharacter(p["q"], p["index"])
    s = complex(p["s_re"], p["s_im"])
    P = periods.twisted_period_mellin(f, chi, s)
    S = periods.twisted_period_series(f, chi, s, p["N"])
    rel = abs(P.value - S.value) / abs(S.value)
    rows = value_rows("mellin", "period", P.value, P.error) + value_rows("series", "period", S.value, S.error, p["N"])
    rows.append(Row("mellin_vs_series", "relative_difference", rel, None, None))
    return rows, {"identity": rel < p["tol"]}, {}


def _rankin(cfg, p, workers):
    f = automorphic.CuspFormSeries.delta()
    s = complex(p["s_re"], p["s_im"])
    mc = periods.rankin_selberg_integral(f, s, p["mc_n"], cfg.seed, workers)
    mirror = periods.rankin_selberg_integral(f, 1 - s, p["mc_n"], cfg.seed + 1, workers)
    sig = math.hypot(mc.error, mirror.error)
    rows = value_rows("monte_carlo", "integral", mc.value, mc.error, p["mc_n"])
    rows += value_rows("monte_carlo_1-s", "integral", mirror.value, mirror.error, p["mc_n"])
    checks = {"symmetry_3sigma": abs(mc.value - mirror.value) <= 3 * sig}
    if s.real > 1:
        o = periods.rankin_selberg_unfolded(s, p["N"])
        rows += value_rows("unfolded_series", "integral", o.value, o.error, p["N"])
        diff = abs(mc.value - o.value)
        rows.append(Row("monte_carlo_vs_series", "relative_difference", diff / abs(o.value), None, None))
        checks["unfolded"] = diff <= max(1e-3 * abs(o.value), 3 * mc.error)
    if s.imag == 0 and s.real > 1:
        checks["integrand_nonnegative"] = mc.params["min_integrand"] >= 0
    return rows, checks, {}


def _heegner(cfg, p, workers):
    suite = flows.default_suite(cfg.seed, p["suite_n"])
    rows, maxes = [], []
    for D0 in p["discriminants"]:
        D = heegner.nearest_fundamental(D0)
        pts = heegner.heegner_points(D).points
        rep = flows.discrepancy(pts, suite)
        maxes.append(rep.max_deviation)
        rows.append(Row(f"D={D}", "class_number", float(pts.size), None, None))
        rows.append(Row(f"D={D}", "max_deviation", rep.max_deviation, None, int(pts.size)))
    decreasing = all(b < a for a, b in zip(maxes, maxes[1:]))
    return rows, {"decreasing": decreasing}, {}


def _heegner_sparse(cfg, p, workers):
    D = heegner.nearest_fundamental(p["D"])
    group = heegner.ClassGroup.of(D)
    h, m = group.order, p["index"]
    if h % m:
        raise ExperimentError(f"index {m} does not divide h({D}) = {h}")
    gen = group.generator()
    if group.element_order(gen) != h:
        raise ExperimentError(f"class group of {D} is not cyclic; pick another discriminant")
    sub = group.subgroup([group.power(gen, m)])
    suite = flows.default_suite(cfg.seed, p["suite_n"])
    rows = [Row(f"D={D}", "class_number", float(h), None, None),
            Row(f"D={D}", "split_prime_weight", float(heegner.split_prime_weight(D, p["delta"])), None, None)]
    union = []
    for i, coset in enumerate(group.cosets(sub)):
        pts = heegner.cm_points(sorted(coset, key=group.elements.index))
        union.extend(coset)
        rep = flows.discrepancy(pts, suite)
        rows.append(Row(f"coset{i}", "max_deviation", rep.max_deviation, None, int(pts.size)))
    exact = sorted(union, key=group.elements.index) == list(group.elements)
    return rows, {"partition": exact}, {"subgroup_order": len(sub)}


def _amplifier(cfg, p, workers):
    lam = hecke.EigenvalueTable.delta((2 * max(p["K"])) ** 2)
    rows, ok = [], True
    for K in p["K"]:
        amp = hecke.amplifier_coefficients(lam, K)
        rows.append(Row(f"K={K}", "total", amp.total, None, amp.size))
        rows.append(Row(f"K={K}", "half_support", amp.size / 2, None, amp.size))
        ok &= amp.total >= amp.size / 2
    return rows, {"lower_bound": bool(ok)}, {}


DISPATCH = {
    "horocycle": _horocycle,
    "sparse-horocycle": _sparse,
    "rational-horocycle": _rational,
    "hecke-orbit": _hecke_orbit,
    "matrix-coefficient": _matrix_coefficient,
    "eisenstein-check": _eisenstein,
    "fourier-coeff": _fourier,
    "twisted-period": _twisted,
    "rankin-selberg": _rankin,
    "heegner": _heegner,
    "heegner-sparse": _heegner_sparse,
    "amplifier": _amplifier,
}


def run_experiment(cfg: ExperimentConfig, workers: int = 1, timing: bool = False) -> Report:
    """Run one experiment.  Wall-clock time is recorded only when ``timing``
    is set, so that default reports are byte-for-byte reproducible."""
    t0 = time.perf_counter()
    try:
        rows, checks, meta = DISPATCH[cfg.kind](cfg, cfg.param_dict, workers)
    except ExperimentError:
        raise
    except (ValueError, ArithmeticError, RuntimeError) as e:
        raise ExperimentError(f"{cfg.kind}: {e}") from e
    elapsed = time.perf_counter() - t0 if timing else None
    return Report(cfg.kind, cfg.to_dict(), tuple(rows), cfg.seed, __version__,
                  {k: bool(v) for k, v in checks.items()}, meta, elapsed)
