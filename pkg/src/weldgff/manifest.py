"""Named verification checks, run configuration, and manifests.

Every lemma-level identity in the package is packaged here as a named check
returning a measured residual and its tolerance.  ``verify_suite`` runs a
selection and emits a reproducible manifest: same config and seed give the
same numbers (timestamps live in a separate field).
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import fields as FD
from . import virasoro as VI
from .beltrami import ghost_sum_check, iota_pullback, laurent_beltrami
from .constants import constants_from_gamma
from .geometry import CurvePolyline, normalized_hausdorff
from .homeo import homeo_from_measures
from .kernels import PsiKernel
from .quadrature import pair_q_beltrami
from .riemann import curve_from_series, riemann_maps_of_curve
from .series import PowerSeriesMap
from .sle import box_dimension, brownian_local_time, loewner_trace, sample_driving
from .welding import tt06_residual, vw_residual, zipper_weld

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    subcommand: str = "verify"
    gamma: float = 2.0          # kappa = gamma^2 = 4 by default
    modes: int = 128
    grid: int = 1024
    samples: int = 200
    seed: int = 7
    tol_scale: float = 1.0
    out_dir: str = "out"
    checks: tuple = ("all",)
    weld_points: int = 2048
    curves_to_write: int = 8
    plots: bool = False

    def __post_init__(self):
        if self.modes <= 0 or self.grid <= 0 or self.samples <= 0:
            raise ValueError("sizes must be positive")
        if not (0 < self.gamma <= 2):
            raise ValueError("gamma must lie in (0, 2]")

    @property
    def kappa(self) -> float:
        return self.gamma * self.gamma

    def constants(self):
        return constants_from_gamma(self.gamma)


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    seconds: float
    detail: str = ""


@dataclass
class RunManifest:
    schema_version: int
    config: dict
    results: list
    wall_clock: float
    n_failed: int
    timestamp: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# individual checks; each returns (residual, tolerance, detail)
# ---------------------------------------------------------------------------


def _witt_states():
    P = VI.ModePoly
    vars_ = [P.monomial(c_exp=1), P.phi(1), P.phi(2), P.phibar(1), P.phibar(2)]
    states = [P.one()] + vars_
    for i, a in enumerate(vars_):
        for b in vars_[i:]:
            states.append(a * b)
    states += [P.phi(1) * P.phi(1) * P.phibar(2), P.monomial(c_exp=2, phis=((1, 1),)),
               P.phi(3), P.phibar(4), P.phi(4) * P.phibar(3),
               P.phi(1) * P.phi(2) * P.phi(3)]
    return states


def check_witt_relations(cfg: RunConfig):
    states = _witt_states()
    bad = 0
    total = 0
    for n in range(-4, 5):
        for m in range(-4, 5):
            for p in states:
                comm = (VI.witt_apply(n, VI.witt_apply(m, p))
                        - VI.witt_apply(m, VI.witt_apply(n, p)))
                expect = VI.witt_apply(n + m, p).scale(Fraction(n - m))
                total += 1
                if not (comm - expect).is_zero():
                    bad += 1
    return float(bad), 0.0, f"{total} exact commutators"


def check_virasoro_relations(cfg: RunConfig):
    P = VI.ModePoly
    gens = [P.phi(1), P.phi(2), P.phi(3), P.phi(4)]
    states = [P.one()] + gens
    for i, a in enumerate(gens):
        for b in gens[i:]:
            states.append(a * b)
    states += [P.phi(1) * P.phi(1) * P.phi(2), P.phi(1, 3), P.phi(2) * P.phi(3) * P.phi(1)]
    cl = VI.central_charge()
    bad = 0
    total = 0
    for n in range(-4, 5):
        for m in range(-4, 5):
            for p in states:
                comm = (VI.ff_apply(n, VI.ff_apply(m, p))
                        - VI.ff_apply(m, VI.ff_apply(n, p)))
                expect = VI.ff_apply(n + m, p).scale(Fraction(n - m))
                if n == -m:
                    expect = expect + p.scale(cl * Fraction(n**3 - n, 12))
                total += 1
                if not (comm - expect).is_zero():
                    bad += 1
    return float(bad), 0.0, f"{total} exact commutators, symbolic central charge"


def check_adjoint_relations(cfg: RunConfig):
    P = VI.ModePoly
    gens = [P.phi(1), P.phi(2), P.phi(3), P.phibar(1), P.phibar(2)]
    monos = [P.one()] + gens
    for i, a in enumerate(gens):
        for b in gens[i:]:
            monos.append(a * b)
    monos += [P.phi(1) * P.phi(1) * P.phibar(2), P.phi(1) * P.phi(2) * P.phi(3)]
    bad = 0
    total = 0
    for n in (1, 2, 3):
        for F in monos:
            for G in monos:
                total += 1
                if not VI.adjoint_residual(n, F, G).is_zero():
                    bad += 1
    return float(bad), 0.0, f"{total} exact adjoint pairings, symbolic alpha"


def check_gram_consistency(cfg: RunConfig):
    bad = 0
    total = 0
    for lk in range(0, 5):
        for lk2 in range(0, 5):
            for k in VI.partitions_of(lk):
                for k2 in VI.partitions_of(lk2):
                    bc = VI.gram_commutator(VI.ALPHA, k, k2)
                    bw = VI.gram_wick(VI.ALPHA, k, k2)
                    total += 1
                    if not (bc - bw).is_zero():
                        bad += 1
    # level-2 degeneracy roots
    parts = VI.partitions_of(2)
    M = [[VI.gram_commutator(VI.ALPHA, a, b) for b in parts] for a in parts]
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    for root in (VI.Coeff.rat(0), VI.GAMMA * Fraction(-1, 2), VI.GAMMA_INV * Fraction(-2)):
        total += 1
        if not det.substitute_alpha(root).substitute_Q().is_zero():
            bad += 1
    generic = det.substitute_alpha(VI.Coeff.rat(1, 3)).substitute_Q().evaluate(1.3)
    if abs(generic) < 1e-8:
        bad += 1
    return float(bad), 0.0, f"{total} exact Gram identities incl. level-2 roots"


def check_ghost_kernel(cfg: RunConfig):
    psi = PowerSeriesMap("interior", np.array([0, 1, 0.1], dtype=complex))
    K = PsiKernel(psi)
    zs = 0.45 * np.exp(2j * np.pi * np.arange(16) / 16)
    pre, sch = psi.schwarzian(zs)
    t_dz = -(2.0 / 3.0) * sch + 0.75 * pre**2
    t_dw = -(5.0 / 6.0) * sch - 1.5 * pre**2
    h = 1e-2

    def fit(sample):
        d1 = (sample(h) - sample(-h)) / (2 * h)
        d2 = (sample(h / 2) - sample(-h / 2)) / h
        return (4 * d2 - d1) / 3.0

    f_dz = fit(lambda d: K(zs + d, zs))
    f_dw = fit(lambda d: K(zs, zs + d))
    r1 = np.max(np.abs(f_dz - t_dz) / np.abs(t_dz))
    r2 = np.max(np.abs(f_dw - t_dw) / np.abs(t_dw))
    r3 = np.max(np.abs((2 * f_dz + f_dw) - (-(13.0 / 6.0) * sch)) / np.abs(sch))
    return float(max(r1, r2, r3)), 1e-8, "Taylor-fitted diagonal derivatives, 16 points"


def check_ghost_sum(cfg: RunConfig):
    g = PowerSeriesMap.exterior_from_coeffs(1.0, 0.0, [0.2])
    mu = laurent_beltrami(2, scale=0.3)
    lhs, rhs, trunc = ghost_sum_check(g, mu, n_max=40)
    return float(abs(lhs - rhs)), 1e-4, f"truncation bound {trunc:.2e}"


_VW_FAMILY = [
    ([0.16, 0.1j, -0.05], [(1, 0.8), (2, -0.3)]),
    ([0.2], [(1, 1.0)]),
    ([0.1, 0.0, 0.05j], [(2, 0.5), (4, 0.2)]),
    ([0.05, -0.04, 0.03j, 0.02], [(3, 0.6)]),
]


def check_viklund_wang(cfg: RunConfig):
    consts = cfg.constants()
    worst = 0.0
    for coeffs, modes in _VW_FAMILY:
        tri = riemann_maps_of_curve(curve_from_series(
            PowerSeriesMap.from_perturbation(coeffs), 2048))
        th = 2 * np.pi * np.arange(2048) / 2048
        fld = np.zeros_like(th)
        for m, amp in modes:
            fld += amp * np.cos(m * th) - 0.3 * amp * np.sin(m * th)
        worst = max(worst, vw_residual(tri, fld, consts.Q))
        worst = max(worst, vw_residual(tri, np.zeros_like(th), consts.Q))
    return float(worst), 1e-5, f"{len(_VW_FAMILY)} curves x (trig + zero) fields"


def check_liouville_variation(cfg: RunConfig):
    consts = cfg.constants()
    f = FD.sample_field(FD.NEUMANN_DOT, 6, seed=cfg.seed, zero_mode=0.2)
    n, s = 2, 0.3
    mu = iota_pullback(laurent_beltrami(n, scale=s))

    def w_circle(z):
        return np.conj(s * 1j * (z**n - 1.0))

    t = 1e-4
    fd = FD.liouville_variation_fd(f, w_circle, t, consts.Q)

    def Tq(z):
        T, _ = FD.stress_tensors(f, z, consts.Q, "interior")
        return T

    pairing, _ = pair_q_beltrami(Tq, mu)
    target = 4 * np.real(pairing)
    rel = abs(fd - target) / abs(target)
    # rotation direction: both sides must vanish
    rot = abs(FD.liouville_action_values(
        FD.boundary_values(f.rotated(0.41), 512), consts.Q)
        - FD.liouville_action_disc(f, consts.Q))
    return float(max(rel, rot)), 1e-3, f"fd={fd:.6f} target={target:.6f} rot={rot:.1e}"


def check_tt06(cfg: RunConfig):
    consts = cfg.constants()
    tri = riemann_maps_of_curve(curve_from_series(
        PowerSeriesMap.from_perturbation([0.1]), 2048))
    mu_r = iota_pullback(laurent_beltrami(2, scale=0.4))
    mu_l = laurent_beltrami(2, scale=0.4)
    res_r = tt06_residual(tri, mu_r, "right", consts, t_step=1e-4)
    res_l = tt06_residual(tri, mu_l, "left", consts, t_step=1e-4)
    return float(max(res_r, res_l)), 1e-3, f"right={res_r:.2e} left={res_l:.2e}"


def check_welding_roundtrip(cfg: RunConfig):
    worst = 0.0
    for coeffs in ([0.16, 0.1j, -0.05], [0.2], [0.05, -0.04, 0.03j]):
        fmap = PowerSeriesMap.from_perturbation(coeffs)
        curve = curve_from_series(fmap, 2048)
        tri = riemann_maps_of_curve(curve)
        back = zipper_weld(tri.h, 2048)
        d = normalized_hausdorff(curve, back.curve, tri.f_prime_0, back.f_prime_0)
        worst = max(worst, d)
    return float(worst), 1e-2, "3 analytic curves at 2048 boundary points"


def check_gmc_mass(cfg: RunConfig, n_samples: int = 10_000):
    gamma = 1.0
    masses = np.empty(n_samples)
    for i in range(n_samples):
        f = FD.sample_field(FD.NEUMANN_DOT, 128, seed=(cfg.seed, 11, i))
        masses[i] = FD.gmc_measure(f, gamma, 512).total_mass()
    target = 2 * np.pi * 2 ** (-(gamma**2) / 4.0)
    rel = abs(float(np.mean(masses)) - target) / target
    return float(rel), 0.05, f"mean={np.mean(masses):.4f} target={target:.4f} n={n_samples}"


def check_sle_dimension(cfg: RunConfig, n_traces: int = 50):
    dims = []
    scales = np.logspace(-2.6, -0.9, 7)
    for i in range(n_traces):
        path = sample_driving(2.0, 10_000, 1e-4, seed=(cfg.seed, 21, i))
        tr = loewner_trace(path, n_out=4096)
        dims.append(box_dimension(tr.curve, scales * tr.curve.diameter()))
    mean = float(np.mean(dims))
    mid = 1.25
    return abs(mean - mid), 0.15, f"mean dim = {mean:.3f} over {n_traces} traces"


def check_local_time(cfg: RunConfig):
    from .geometry import CurvePolyline as _CP
    from .sle import _densified

    path = sample_driving(2.0, 4000, 1.0 / 4000, seed=(cfg.seed, 31))
    tr = loewner_trace(path, n_out=2048)
    curve = _CP(_densified(tr.curve.points, 0.01), closed=False)
    alpha = 1.25
    x = curve.points[len(curve.points) // 2]
    m1, _, v1 = brownian_local_time(curve, x, T=0.02, eps=0.06, n_mc=400,
                                    seed=(cfg.seed, 32), alpha=alpha)
    m2, _, v2 = brownian_local_time(curve, x, T=0.02, eps=0.03, n_mc=400,
                                    seed=(cfg.seed, 32), alpha=alpha)
    stability = abs(m1 - m2) / m1
    positive = float(np.mean(v1 > 0))
    res = max(stability / 0.25, (1.0 - positive) / 0.05)
    return float(res), 1.0, f"stability={stability:.3f} positive={positive:.3f}"


def check_pipeline_sanity(cfg: RunConfig, n_ks: int = 500, n_weld: int = 6):
    from scipy.stats import kstest

    # near-zero gamma: welded curves are circles
    worst = 0.0
    for i in range(n_weld):
        rng = np.random.default_rng((cfg.seed, 41, i))
        alpha = rng.uniform(0, 2 * np.pi)
        f1 = FD.sample_field(FD.NEUMANN_DOT, 64, seed=(cfg.seed, 42, i))
        f2 = FD.sample_field(FD.NEUMANN_DOT, 64, seed=(cfg.seed, 43, i))
        m1 = FD.gmc_measure(f1, 1e-8, 512)
        m2 = FD.gmc_measure(f2, 1e-8, 512)
        h = homeo_from_measures(m1, m2, alpha, N=1024)
        tri = zipper_weld(h, 1024)
        circle = CurvePolyline(np.exp(2j * np.pi * np.arange(1024) / 1024))
        worst = max(worst, normalized_hausdorff(tri.curve, circle,
                                                tri.f_prime_0, 1.0))
    # anchor-rotation marginal: h(1) uniform on the circle
    angles = np.empty(n_ks)
    for i in range(n_ks):
        rng = np.random.default_rng((cfg.seed, 44, i))
        alpha = rng.uniform(0, 2 * np.pi)
        f1 = FD.sample_field(FD.NEUMANN_DOT, 64, seed=(cfg.seed, 45, i))
        f2 = FD.sample_field(FD.NEUMANN_DOT, 64, seed=(cfg.seed, 46, i))
        m1 = FD.gmc_measure(f1, 1.0, 256)
        m2 = FD.gmc_measure(f2, 1.0, 256)
        h = homeo_from_measures(m1, m2, alpha, N=256)
        angles[i] = np.angle(h.point_map(1.0)) % (2 * np.pi)
    p = kstest(angles / (2 * np.pi), "uniform").pvalue
    res = max(worst / 1e-2, 0.01 / max(p, 1e-300))
    return float(res), 1.0, f"hausdorff={worst:.2e} ks_p={p:.3f}"


CHECKS = {
    "witt_relations": check_witt_relations,
    "virasoro_relations": check_virasoro_relations,
    "adjoint_relations": check_adjoint_relations,
    "gram_consistency": check_gram_consistency,
    "ghost_kernel": check_ghost_kernel,
    "ghost_sum": check_ghost_sum,
    "viklund_wang": check_viklund_wang,
    "liouville_variation": check_liouville_variation,
    "tt06": check_tt06,
    "welding_roundtrip": check_welding_roundtrip,
    "gmc_mass": check_gmc_mass,
    "sle_dimension": check_sle_dimension,
    "local_time": check_local_time,
    "pipeline_sanity": check_pipeline_sanity,
}


def verify_suite(cfg: RunConfig, write: bool = True) -> RunManifest:
    """Run the selected checks; write the manifest; continue past failures."""
    names = list(CHECKS) if "all" in cfg.checks else [n for n in cfg.checks]
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks: {unknown}")
    t0 = time.perf_counter()
    results = []
    for name in names:
        s0 = time.perf_counter()
        try:
            residual, tol, detail = CHECKS[name](cfg)
        except Exception as exc:  # recorded, suite continues
            results.append(CheckResult(name, False, float("nan"), float("nan"),
                                       time.perf_counter() - s0, f"error: {exc}"))
            continue
        tol_eff = tol * cfg.tol_scale
        passed = residual <= tol_eff
        results.append(CheckResult(name, passed, residual, tol_eff,
                                   time.perf_counter() - s0, detail))
    wall = time.perf_counter() - t0
    n_failed = sum(not r.passed for r in results)
    manifest = RunManifest(schema_version=SCHEMA_VERSION,
                           config=asdict(cfg), results=[asdict(r) for r in results],
                           wall_clock=round(wall, 3), n_failed=n_failed,
                           timestamp=time.strftime("%Y-%m-%dT%H:%M:%S"))
    if write:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verify_manifest.json").write_text(manifest.to_json())
    return manifest
