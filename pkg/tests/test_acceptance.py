"""
Acceptance gate.  Each test checks one criterion at its stated tolerance and
records a PASS/FAIL line, printed in the "acceptance criteria" section at the
end of the pytest run.
"""

import math

import numpy as np
from scipy import integrate, special, stats

from pball.ball_geometry import FIRST_QUADRANT, FULL, PBall, dirichlet_integral, pball_volume
from pball.cli import main
from pball.concentration import CUBE_DERIVATIVE, ExperimentConfig, run_ball_experiment, run_cube_experiment
from pball.distributions import FiniteCoordDensity, GenExponent, GenNormal, PNormOrder, coordinate_law
from pball.meanvalue import mean_even, mean_odd

ORDERS = [(1, 1), (4, 3), (3, 2), (2, 1), (5, 2), (3, 1), (4, 1), (6, 1)]
# sqrt(2)/2 + ln(1 + sqrt(2))/2
ARC_LENGTH = 1.14779357469631903701714902459


def order(p0, q0=1):
    return PNormOrder.ratio(p0, q0)


def test_criterion_1_distribution_identities(criterion):
    x = np.linspace(-4, 4, 41)
    gauss = np.exp(-x * x / 2) / math.sqrt(2 * math.pi)
    err_n = float(np.max(np.abs(GenNormal(order(2), 1.0).pdf(x) - gauss)))
    err_e = 0.0
    xe = np.linspace(0, 4, 41)
    for lam in (0.5, 1.0, 2.0, 3.7):
        d = GenExponent.from_rate(order(1), lam)
        err_e = max(err_e, float(np.max(np.abs(d.pdf(xe) - lam * np.exp(-lam * xe)))))
    ok = err_n <= 1e-12 and err_e <= 1e-12
    criterion(1, "high-order normal p=2 and exponent p=1 match closed forms to 1e-12", ok,
              f"max err normal {err_n:.1e}, exponent {err_e:.1e}")
    assert ok


def test_criterion_2_normalization(criterion):
    worst = 0.0
    for p0, q0 in ORDERS:
        o = order(p0, q0)
        n = GenNormal(o, 1.0)
        e = GenExponent(o, 1.0)
        zn = 2 * integrate.quad(n.pdf, 0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        ze = integrate.quad(e.pdf, 0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        worst = max(worst, abs(zn - 1), abs(ze - 1))
    worst_mean = 0.0
    for p0, q0 in ORDERS:
        o = order(p0, q0)
        worst_mean = max(worst_mean, abs(mean_odd("1", o, 1.7).value - 1))
        if o.full_line:
            worst_mean = max(worst_mean, abs(mean_even("1", o, 1.7).value - 1))
    ok = worst <= 1e-9 and worst_mean <= 1e-10
    criterion(2, "densities integrate to 1 within 1e-9; mean of g=1 is 1 within 1e-10", ok,
              f"pdf {worst:.1e}, mean {worst_mean:.1e}")
    assert ok


def test_criterion_3_finite_marginal_convergence(criterion):
    details, ok = [], True
    for p in (1, 2, 3, 4):
        o = order(p)
        limit = coordinate_law(o, 1.0)
        x = np.linspace(-8, 8, 4001) if o.full_line else np.linspace(0, 8, 2001)
        dist = [float(np.max(np.abs(FiniteCoordDensity(o, 1.0, n).pdf(x) - limit.pdf(x)))) for n in (8, 32, 128, 512)]
        ok &= all(b < a for a, b in zip(dist, dist[1:])) and dist[-1] <= 0.01
        details.append(f"p={p}: {dist[-1]:.1e}")
    criterion(3, "finite-n marginal approaches the limit law monotonically, <= 0.01 at n=512", ok, ", ".join(details))
    assert ok


def test_criterion_4_volumes(criterion):
    disk = pball_volume(PBall(2, order(2)))
    cross = 2**3 * pball_volume(PBall(3, 1.0, region=FIRST_QUADRANT))
    lemma_disk = 4 * dirichlet_integral([1, 1])
    # the full region needs an even-rational order, so for p=3 the volume is 2^n times the quadrant
    v43 = 2**4 * pball_volume(PBall(4, 3.0, region=FIRST_QUADRANT))
    rng = np.random.default_rng(20240601)
    hits, total = 0, 10_000_000
    for _ in range(10):
        pts = rng.uniform(-1, 1, size=(total // 10, 4))
        hits += int(np.count_nonzero(np.sum(np.abs(pts) ** 3, axis=1) <= 1))
    frac = hits / total
    mc = 16 * frac
    se = 16 * math.sqrt(frac * (1 - frac) / total)
    ok = (abs(disk - math.pi) <= 1e-12 and abs(lemma_disk - math.pi) <= 1e-12 and abs(cross - 4 / 3) <= 1e-12
          and abs(v43 - mc) <= 3 * se)
    criterion(4, "volumes pi, 4/3 and MC rejection volume for n=4, p=3 within 3 SE", ok,
              f"n4p3 {v43:.6f} vs MC {mc:.6f}, {abs(v43 - mc) / se:.2f} SE")
    assert ok


def test_criterion_5_gamma_transform(criterion):
    crit = 1.628 / math.sqrt(100_000)
    stats_ = []
    for p, beta in ((2, 1.0), (3, 2.0), (1, 1.0)):
        law = coordinate_law(order(p), 1.0)
        x = law.sample(np.random.default_rng(0), 100_000)
        z = np.abs(x) ** p / (p * beta)
        assert np.allclose(law.to_gamma(x, beta), z, rtol=1e-14)
        d = stats.kstest(z, lambda v: special.gammainc(1 / p, beta * v)).statistic
        stats_.append(d)
    ok = all(d < crit for d in stats_)
    criterion(5, "X^p/(p beta) is Gamma(1/p, beta) by KS at 1%", ok,
              "D = " + ", ".join(f"{d:.4f}" for d in stats_) + f" vs {crit:.4f}")
    assert ok


def test_criterion_6_intro_examples(criterion):
    base = dict(region=CUBE_DERIVATIVE, a=0.0, b=1.0, n_grid=(16, 64, 256, 1024), samples_per_n=20000, seed=0)
    arc = run_cube_experiment(ExperimentConfig("sqrt(1+x1^2)", **base)).row(1024)
    area = run_cube_experiment(ExperimentConfig("x1", apply_to="path", **base)).row(1024)
    z_arc = abs(arc.mean - ARC_LENGTH) / arc.stderr
    z_area = abs(area.mean - 0.25) / area.stderr
    ok = z_arc <= 4 and z_area <= 4
    criterion(6, "arc length and area on the derivative cube within 4 SE at n=1024", ok,
              f"arc {z_arc:.2f} SE, area {z_area:.2f} SE")
    assert ok


CONCENTRATION_CASES = [
    ("x1^2", order(2), FULL),
    ("cos(x1)", order(2), FULL),
    ("x1", order(1), FIRST_QUADRANT),
    ("x1^2", order(1), FIRST_QUADRANT),
]


def test_criterion_7_complete_concentration(criterion):
    parts, ok = [], True
    for g, o, region in CONCENTRATION_CASES:
        rep = run_ball_experiment(ExperimentConfig(g, o, region=region, seed=0))
        target = (mean_even if region == FULL else mean_odd)(g, o, 1.0).value
        last = rep.row(1024)
        z = abs(last.mean - target) / last.stderr
        case_ok = z <= 4 and rep.slope <= -0.8
        ok &= case_ok
        parts.append(f"{g} p={o.p:g}: {z:.1f} SE, slope {rep.slope:.2f}")
    criterion(7, "means at n=1024 within 4 SE of the limit means and variance slope <= -0.8", ok, "; ".join(parts))
    assert ok


def test_criterion_8_nonlinear_exchange(criterion):
    cfg = ExperimentConfig(["x1^2", "cos(x1)"], order(2), h="sin(y1+y2)", seed=0)
    rep = run_ball_experiment(cfg)
    ex = rep.exchange
    z = ex["deviation"] / ex["stderr"]
    ok = ex["deviation"] <= 4 * ex["stderr"]
    criterion(8, "E sin(Y1+Y2) within 4 SE of sin(EY1+EY2) at n=1024", ok,
              f"deviation {ex['deviation']:.2e}, SE {ex['stderr']:.2e}, {z:.1f} SE")
    assert ok


def test_criterion_9_determinism(criterion, tmp_path):
    argv = ["concentrate", "--g", "cos(x1)", "--p0", "2", "--q0", "1", "--R", "1", "--region", "full",
            "--seed", "7", "--n-grid", "16,64,256", "--samples", "5000", "--chunk-size", "1000"]
    same = True
    for fmt in ("csv", "json"):
        files = []
        for run, workers in enumerate(("1", "1", "3")):
            path = tmp_path / f"{run}.{fmt}"
            assert main([*argv, "--format", fmt, "--workers", workers, "--out", str(path)]) == 0
            files.append(path.read_bytes())
        if fmt == "json":
            # the worker count is echoed, so only the two single-worker runs must match byte for byte
            same &= files[0] == files[1]
        else:
            same &= files[0] == files[1] == files[2]
    criterion(9, "repeated concentrate runs give byte-identical CSV and JSON", same)
    assert same
