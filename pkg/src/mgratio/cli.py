"""Command-line interface: ``mgratio <verb> [--config PATH] [--seed N] [--draws N] [--out PATH]``.

Verbs: fit, sweep, validate, selftest, meijer-debug.
Exit codes: 0 ok, 1 config error, 2 fit failure, 3 evaluation error, 4 validation failure.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys

import numpy as np

from . import __version__, channels, meijer, metrics, montecarlo, specfun
from .cascade import CascadeChain, RatioOfChains
from .config import ChannelSpec, RunConfig, SeriesSpec, load_config
from .errors import ConfigError, MGError, TargetUnreachableError
from .meijer import MeijerGSpec
from .mixture import MixtureGamma, default_grid, mse_between, normalize_log

EXIT_OK, EXIT_CONFIG, EXIT_FIT, EXIT_EVAL, EXIT_VALIDATION = 0, 1, 2, 3, 4
MIN_VALIDATE_DRAWS = 10_000


class EvaluationError(Exception):
    pass


# channel models --------------------------------------------------------------

def channel_object(spec: ChannelSpec, gbar: float = 1.0):
    p = spec.params
    if spec.model == "bx":
        return channels.BeaulieuXieChannel(p["m"], p["lambda"], gbar)
    return channels.AlemsChannel(p["alpha"], p["lambda"], p["eta"], p["mu"], p["m"], gbar)


def _fitter(spec: ChannelSpec, gbar: float):
    ch = channel_object(spec, gbar)
    if spec.model == "bx":
        return (lambda L: channels.bx_to_mg(ch, L, spec.id)), (lambda g: channels.bx_exact_pdf(ch, g))
    return (lambda L: channels.alems_to_mg(ch, L, spec.id)), (lambda g: channels.alems_exact_pdf(ch, g))


def fit_channel(spec: ChannelSpec, gbar: float, terms: int, mse_target: float | None):
    """(mg, L, mse) for the channel at scale parameter ``gbar``; MSE on (0, 5 gbar]."""
    fitter, exact = _fitter(spec, gbar)
    grid = default_grid(gbar)
    if mse_target is not None:
        L, mg, mse = channels.select_terms(exact, fitter, mse_target, grid)
        return mg, L, mse
    mg = fitter(spec.terms or terms)
    return mg, len(mg), mse_between(exact, mg.pdf, grid)


class Models:
    """MG fits per channel, fitted once at unit scale and rescaled along the sweep."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self._base = {}

    def base(self, cid: str) -> MixtureGamma:
        if cid not in self._base:
            spec = self.cfg.channels[cid]
            if self.cfg.mse_target is not None:
                self._base[cid] = fit_channel(spec, 1.0, self.cfg.terms, self.cfg.mse_target)[0]
            else:
                self._base[cid] = _fitter(spec, 1.0)[0](spec.terms or self.cfg.terms)
        return self._base[cid]

    def mg(self, cid: str, x_db: float, analytic: bool = True) -> MixtureGamma:
        spec = self.cfg.channels[cid]
        gbar = spec.gbar_at(x_db)
        base = self.base(cid)
        mg = base.with_mean(gbar) if spec.snr == "mean" else base.scaled(gbar)
        if analytic and spec.corrupt_beta:
            mg = normalize_log(np.log(mg.sigma), mg.beta + spec.corrupt_beta, mg.zeta, mg.label)
        return mg


def build_variate(series: SeriesSpec, models: Models, x_db: float, analytic: bool = True):
    hops = []
    for num, den in series.hops:
        top = CascadeChain([models.mg(c, x_db, analytic) for c in num])
        if den:
            hops.append(RatioOfChains(top, CascadeChain([models.mg(c, x_db, analytic) for c in den])))
        else:
            hops.append(top)
    if series.metric == "multihop-op":
        return metrics.MultihopSystem(tuple(hops))
    return hops[0]


def analytic_value(series: SeriesSpec, v, method: str) -> float:
    p, m = series.params, series.metric
    if m == "op":
        th = 10.0 ** (p["gamma_th_db"] / 10.0)
        if isinstance(v, RatioOfChains):
            return metrics.ratio_cdf(v, th, method)
        return metrics.outage(v, th, method)
    if m == "abep":
        scheme = metrics.ModulationScheme(p["scheme"])
        if scheme.kind in metrics._NONCOHERENT:
            return metrics.abep_noncoherent(v, scheme, method)
        return metrics.abep_coherent(v, scheme, method)
    if m == "asep-mpsk":
        return metrics.asep_mpsk(v, p["order"], method=method)
    if m == "asep-mqam":
        return metrics.asep_mqam(v, p["order"], method=method)
    if m == "er":
        return metrics.effective_rate(v, p["A"], method)
    if m == "auc":
        return metrics.avg_auc(v, p["u"], method)
    if m == "cauc":
        return metrics.complementary_auc(v, p["u"], method)
    if m == "multihop-op":
        return metrics.multihop_outage(v, 10.0 ** (p["gamma_th_db"] / 10.0), method)
    sc = metrics.SecrecyScenario(v.numerator, v.denominator, p.get("r_th", 0.0))
    if m == "sop":
        return metrics.sop_lower(sc, method)
    return metrics.pnsc(sc, method)


def mc_kernel(series: SeriesSpec) -> tuple[str, dict]:
    p, m = series.params, series.metric
    if m in ("op", "multihop-op"):
        return "op", {"gamma_th": 10.0 ** (p["gamma_th_db"] / 10.0)}
    if m == "abep":
        scheme = metrics.ModulationScheme(p["scheme"])
        return ("nc" if scheme.kind in metrics._NONCOHERENT else "coherent"), {"scheme": scheme}
    if m == "asep-mpsk":
        return "mpsk", {"M": p["order"]}
    if m == "asep-mqam":
        return "mqam", {"M": p["order"]}
    if m == "er":
        return "er", {"A": p["A"]}
    if m in ("auc", "cauc"):
        return m, {"u": p["u"]}
    if m == "sop":
        return "op", {"gamma_th": 2.0 ** p.get("r_th", 0.0)}
    return "above", {"gamma_th": 1.0}


def evaluate_point(series: SeriesSpec, models: Models, x_db: float, method: str, draws: int, seed: int):
    """(analytic, McReport or None) for one series at one grid point."""
    try:
        a = analytic_value(series, build_variate(series, models, x_db), method)
        rep = None
        if draws > 0:
            kernel, kp = mc_kernel(series)
            rep = montecarlo.mc_metric(kernel, build_variate(series, models, x_db, analytic=False),
                                       kp, draws, seed)
    except (MGError, ArithmeticError, ValueError) as exc:
        raise EvaluationError(f"series {series.name!r} at gbar_db={x_db:g}: {exc}") from exc
    return a, rep


# output ----------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _write(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    parent = os.path.dirname(os.path.abspath(out))
    os.makedirs(parent, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def sweep_csv(cfg: RunConfig, series: SeriesSpec, models: Models, draws: int, seed: int) -> str:
    buf = io.StringIO()
    header = ["gbar_db", "analytic"] + (["mc", "mc_stderr", "abs_diff"] if draws > 0 else [])
    buf.write(",".join(header) + "\n")
    for x in cfg.grid:
        a, rep = evaluate_point(series, models, x, cfg.method, draws, seed)
        row = [_fmt(x), _fmt(a)]
        if rep is not None:
            row += [_fmt(rep.estimate), _fmt(rep.std_error), _fmt(abs(a - rep.estimate))]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


# verbs -----------------------------------------------------------------------

def cmd_fit(cfg: RunConfig, out: str | None) -> int:
    if not cfg.channels:
        raise ConfigError("no [channel.<id>] sections to fit", None, cfg.path)
    records, reports = [], []
    for cid, spec in cfg.channels.items():
        gbar = spec.gbar_at(0.0)
        try:
            mg, L, mse = fit_channel(spec, gbar, cfg.terms, cfg.mse_target)
        except TargetUnreachableError as exc:
            print(f"error: channel {cid}: {exc}", file=sys.stderr)
            return EXIT_FIT
        records.append(mg.to_text())
        reports.append(f"L={L} mse={mse!r}")
    if out is None:
        for rec, rep in zip(records, reports):
            sys.stdout.write(rec + rep + "\n")
    else:
        _write("".join(records), out)
        sys.stdout.write("".join(r + "\n" for r in reports))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, out: str | None, draws: int, seed: int) -> int:
    if not cfg.series:
        raise ConfigError("no [series.<name>] sections to sweep", None, cfg.path)
    if len(cfg.series) > 1 and out is None:
        raise ConfigError("several series need --out <directory> (one CSV per series)", None, cfg.path)
    models = Models(cfg)
    tables = [(s, sweep_csv(cfg, s, models, draws, seed)) for s in cfg.series]
    if len(tables) == 1 and (out is None or not os.path.isdir(out)) and not (out or "").endswith(os.sep):
        _write(tables[0][1], out)
    else:
        os.makedirs(out, exist_ok=True)
        for s, text in tables:
            _write(text, os.path.join(out, f"{s.name}.csv"))
    return EXIT_OK


def cmd_validate(cfg: RunConfig, out: str | None, draws: int, seed: int) -> int:
    if draws < MIN_VALIDATE_DRAWS:
        raise ConfigError(f"validate needs at least {MIN_VALIDATE_DRAWS} draws, got {draws}", None, cfg.path)
    if not cfg.series:
        raise ConfigError("no [series.<name>] sections to validate", None, cfg.path)
    models = Models(cfg)
    buf = io.StringIO()
    buf.write("metric,analytic,mc,stderr,z_score\n")
    worst = 0.0
    for s in cfg.series:
        for x in cfg.grid:
            a, rep = evaluate_point(s, models, x, cfg.method, draws, seed)
            z = rep.z_score(a)
            worst = max(worst, abs(z)) if math.isfinite(z) else math.inf
            buf.write(",".join([f"{s.name}@{x:g}dB", _fmt(a), _fmt(rep.estimate),
                                _fmt(rep.std_error), _fmt(z)]) + "\n")
    _write(buf.getvalue(), out)
    if worst > 3.0:
        print(f"validation failed: max |z| = {worst:.3g} > 3", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def selftest_checks():
    """(name, value, reference, tolerance) rows of the identity suite."""
    rows = []
    rows.append(("log Gamma(1/2)", specfun.log_gamma(0.5).real, 0.5 * math.log(math.pi), 1e-13))
    rows.append(("Gamma(5)", math.exp(specfun.log_gamma(5.0).real), 24.0, 1e-13))
    rows.append(("P(1, 1)", specfun.regularized_lower_gamma(1.0, 1.0), 1.0 - math.exp(-1.0), 1e-13))
    rows.append(("P(2.5, 3)", specfun.regularized_lower_gamma(2.5, 3.0), 0.6937810815, 1e-9))
    rows.append(("I_{-1/2}(1)", specfun.bessel_i(-0.5, 1.0), math.sqrt(2.0 / math.pi) * math.cosh(1.0), 1e-13))
    rows.append(("2 K_0(2)", 2.0 * specfun.bessel_k(0.0, 2.0), 0.22778774549906685, 1e-12))
    rows.append(("Q(1)", specfun.gaussian_q(1.0), 0.15865525393145705, 1e-13))
    rule = specfun.gauss_laguerre(10)
    rows.append(("GL10 int x^5 e^-x", float(np.dot(rule.weights, np.asarray(rule.nodes) ** 5)), 120.0, 1e-12))
    for z in (0.01, 1.0, 10.0, 50.0):
        rows.append((f"G^(1,0)_(0,1)[{z:g}|-;0] = e^-z",
                     meijer.eval(MeijerGSpec(1, 0, 0, 1, (), (0.0,)), z), math.exp(-z), 1e-8))
    rows.append(("G^(2,0)_(0,2)[1|-;0,0] = 2 K_0(2)",
                 meijer.eval_contour(MeijerGSpec(2, 0, 0, 2, (), (0.0, 0.0)), 1.0), 0.22778774549906685, 1e-8))
    for z in (0.1, 2.0, 20.0):
        # G^{2,0}_{0,2}[z | b1, b2] = 2 z^((b1+b2)/2) K_{b1-b2}(2 sqrt z)
        rows.append((f"G^(2,0)_(0,2)[{z:g}|-;0.3,-0.3] = 2 K_0.6", meijer.eval(
            MeijerGSpec(2, 0, 0, 2, (), (0.3, -0.3)), z), 2.0 * specfun.bessel_k(0.6, 2.0 * math.sqrt(z)), 1e-8))
    for z in (0.5, 3.0):
        rows.append((f"G^(1,1)_(1,2)[{z:g}|1;2.5,0] = lower gamma", meijer.eval(
            MeijerGSpec(1, 1, 1, 2, (1.0,), (2.5, 0.0)), z),
            specfun.regularized_lower_gamma(2.5, z) * math.gamma(2.5), 1e-8))
    for z in (0.2, 5.0):
        rows.append((f"G^(1,1)_(1,1)[{z:g}|-0.5;0] = binomial", meijer.eval(
            MeijerGSpec(1, 1, 1, 1, (-0.5,), (0.0,)), z), math.gamma(1.5) * (1.0 + z) ** -1.5, 1e-8))
    for z in (0.3, 4.0):
        spec = MeijerGSpec(2, 1, 1, 3, (0.4,), (0.2, 1.1, -0.3))
        rows.append((f"{spec} at {z:g}: residues vs contour",
                     meijer.eval_residues(spec, z), meijer.eval_contour(spec, z), 1e-8))
    return rows


def cmd_selftest(out: str | None) -> int:
    buf = io.StringIO()
    failed = 0
    for name, value, ref, tol in selftest_checks():
        err = abs(value - ref) / max(abs(ref), 1e-300)
        ok = err <= tol
        failed += not ok
        buf.write(f"{'PASS' if ok else 'FAIL'}  {name:<52s} {value:.16g}  ref {ref:.16g}  rel {err:.1e}\n")
    buf.write(f"{'all identities pass' if not failed else f'{failed} identities FAILED'}\n")
    _write(buf.getvalue(), out)
    return EXIT_OK if not failed else EXIT_EVAL


def cmd_meijer_debug(cfg: RunConfig, out: str | None) -> int:
    if cfg.meijer is None:
        raise ConfigError("meijer-debug needs a [meijer] section", None, cfg.path)
    p = cfg.meijer
    try:
        spec = MeijerGSpec(p["m"], p["n"], p["p"], p["q"], p["a"], p["b"])
    except MGError as exc:
        raise ConfigError(f"[meijer] {exc}", None, cfg.path) from None
    try:
        detail, t, vals = meijer.integrand_samples(spec, p["z"])
    except (MGError, ArithmeticError, ValueError) as exc:
        print(f"error: {spec} at z={p['z']}: {exc}", file=sys.stderr)
        return EXIT_EVAL
    summary = (f"# {spec} z={p['z']!r} c={detail.c!r} step={detail.step!r} t_max={detail.t_max!r} "
               f"nodes={detail.nodes} value={detail.value!r} condition={detail.condition:.3g}\n")
    buf = io.StringIO()
    buf.write("t,re,im\n")
    for tk, v in zip(t, vals):
        buf.write(f"{_fmt(tk)},{_fmt(v.real)},{_fmt(v.imag)}\n")
    sys.stderr.write(summary)
    _write(buf.getvalue(), out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mgratio", description="Products and ratios of MG variates.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("verb", choices=("fit", "sweep", "validate", "selftest", "meijer-debug"))
    ap.add_argument("--config", help="run configuration file")
    ap.add_argument("--seed", type=int, help="override [mc] seed (u64)")
    ap.add_argument("--draws", type=int, help="override [mc] draws (0 disables MC)")
    ap.add_argument("--out", help="output file (or directory for several series)")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError(f"--seed must be a u64, got {args.seed}")
        if args.draws is not None and args.draws < 0:
            raise ConfigError(f"--draws must be >= 0, got {args.draws}")
        if args.verb == "selftest":
            return cmd_selftest(args.out)
        if not args.config:
            raise ConfigError(f"{args.verb} needs --config")
        cfg = load_config(args.config)
        draws = cfg.draws if args.draws is None else args.draws
        seed = cfg.seed if args.seed is None else args.seed
        if args.verb == "fit":
            return cmd_fit(cfg, args.out)
        if args.verb == "sweep":
            return cmd_sweep(cfg, args.out, draws, seed)
        if args.verb == "validate":
            return cmd_validate(cfg, args.out, draws, seed)
        return cmd_meijer_debug(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EvaluationError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
