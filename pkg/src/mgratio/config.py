"""Run configuration: flat ``key = value`` text grouped under ``[section]`` headers.

Sections
--------
``[run]``
    ``metric`` plus its parameters, ``method`` (mellin | combos), ``terms`` (MG
    terms per channel, default 15) and optionally ``mse_target``.
``[sweep]``
    ``start_db``, ``stop_db``, ``step_db`` (inclusive grid) or ``points_db`` (comma list).
``[mc]``
    ``draws`` (0 disables the MC columns) and ``seed``.
``[channel.<id>]``
    ``model`` (bx | alems) and its parameters; ``gbar_db`` is a number, ``sweep``
    or ``sweep+<dB>`` / ``sweep-<dB>``; ``snr`` is ``mean`` (gbar sets the mean,
    the default) or ``parameter`` (gbar is the model's own scale parameter).
``[series.<name>]``
    ``variate``: channel ids joined by ``*`` (product) and ``/`` (ratio), hops
    separated by ``;``. May override any metric parameter of ``[run]``.
``[meijer]``
    ``m n p q a b z`` for the ``meijer-debug`` verb.

Only ``#`` starts a comment, since ``;`` separates hops.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

METRICS = {
    "op": ("gamma_th_db",),
    "abep": ("scheme",),
    "asep-mpsk": ("order",),
    "asep-mqam": ("order",),
    "er": ("A",),
    "auc": ("u",),
    "cauc": ("u",),
    "multihop-op": ("gamma_th_db",),
    "sop": ("r_th",),
    "pnsc": (),
}
_METRIC_KEYS = {"gamma_th_db", "scheme", "order", "a", "u", "r_th"}
_MODELS = {"bx": ("m", "lambda"), "alems": ("alpha", "lambda", "eta", "mu", "m")}
_SWEEP_RE = re.compile(r"^sweep\s*(?:([+-])\s*([0-9.eE+-]+))?$")
_ID_RE = re.compile(r"^[A-Za-z0-9_]+$")


@dataclass(frozen=True)
class ChannelSpec:
    id: str
    model: str
    params: dict
    gbar_db: float
    swept: bool
    snr: str = "mean"
    terms: int | None = None
    corrupt_beta: float = 0.0

    def gbar_at(self, x_db: float) -> float:
        return 10.0 ** ((x_db + self.gbar_db if self.swept else self.gbar_db) / 10.0)


@dataclass(frozen=True)
class SeriesSpec:
    name: str
    hops: tuple  # of (numerator ids, denominator ids)
    metric: str
    params: dict

    @property
    def is_ratio(self) -> bool:
        return any(den for _, den in self.hops)


@dataclass(frozen=True)
class RunConfig:
    path: str
    method: str
    terms: int
    mse_target: float | None
    grid: tuple
    draws: int
    seed: int
    channels: dict
    series: tuple
    meijer: dict | None = field(default=None)


class _Lines:
    """(section, key) -> line number, for diagnostics."""

    def __init__(self, text: str):
        self.section_line = {}
        self.key_line = {}
        section = None
        for no, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            m = re.match(r"^\[(.+)\]$", line)
            if m:
                section = m.group(1).strip()
                self.section_line.setdefault(section, no)
                continue
            m = re.match(r"^([^=:#\s][^=:]*?)\s*[=:]", line)
            if m and section is not None:
                self.key_line.setdefault((section, m.group(1).strip().lower()), no)

    def of(self, section: str, key: str | None = None):
        if key is not None and (section, key) in self.key_line:
            return self.key_line[(section, key)]
        return self.section_line.get(section)


class _Reader:
    def __init__(self, cp: configparser.ConfigParser, lines: _Lines, path: str):
        self.cp, self.lines, self.path = cp, lines, path

    def error(self, msg, section=None, key=None):
        return ConfigError(msg, self.lines.of(section, key) if section else None, self.path)

    def get(self, section, key, default=None, required=False):
        if self.cp.has_option(section, key):
            return self.cp.get(section, key).strip()
        if required:
            raise self.error(f"[{section}] is missing '{key}'", section)
        return default

    def number(self, section, key, default=None, required=False, kind=float, check=None, what=""):
        raw = self.get(section, key, None, required)
        if raw is None:
            return default
        try:
            val = kind(raw)
        except ValueError:
            raise self.error(f"[{section}] {key} = {raw!r} is not a valid {kind.__name__}", section, key) from None
        if isinstance(val, float) and not math.isfinite(val):
            raise self.error(f"[{section}] {key} must be finite", section, key)
        if check is not None and not check(val):
            raise self.error(f"[{section}] {key} = {raw} {what}", section, key)
        return val


def _metric_params(rd: _Reader, section: str, base: dict) -> dict:
    out = dict(base)
    for key in _METRIC_KEYS:
        raw = rd.get(section, key)
        if raw is None:
            continue
        if key == "scheme":
            out["scheme"] = raw.lower()
        elif key in ("order", "u"):
            out[key] = rd.number(section, key, kind=int, check=lambda v: v >= 1, what="must be >= 1")
        elif key == "a":
            out["A"] = rd.number(section, key, check=lambda v: v > 0, what="must be positive")
        elif key == "r_th":
            out[key] = rd.number(section, key, check=lambda v: v >= 0, what="must be >= 0")
        else:
            out[key] = rd.number(section, key)
    return out


def _parse_variate(rd: _Reader, section: str, text: str, channels: dict) -> tuple:
    hops = []
    for hop_text in text.split(";"):
        parts = hop_text.split("/")
        if len(parts) > 2:
            raise rd.error(f"variate hop {hop_text.strip()!r} has more than one '/'", section, "variate")
        num = tuple(t.strip() for t in parts[0].split("*"))
        den = tuple(t.strip() for t in parts[1].split("*")) if len(parts) == 2 else ()
        for cid in num + den:
            if not cid:
                raise rd.error(f"empty channel id in variate {text!r}", section, "variate")
            if cid not in channels:
                raise rd.error(f"variate refers to unknown channel {cid!r}", section, "variate")
        hops.append((num, den))
    return tuple(hops)


def _check_series(rd: _Reader, s: SeriesSpec):
    section = f"series.{s.name}"
    for key in METRICS[s.metric]:
        if key not in s.params:
            raise rd.error(f"metric {s.metric!r} needs '{key}' in [run] or [{section}]", section)
    if s.metric == "multihop-op":
        if not all(den for _, den in s.hops):
            raise rd.error("multihop-op needs every hop to be a ratio 'a*b/c'", section, "variate")
        if len(s.hops) > 3:
            raise rd.error("multihop-op supports at most three hops", section, "variate")
        return
    if len(s.hops) != 1:
        raise rd.error(f"metric {s.metric!r} takes a single hop (no ';')", section, "variate")
    if s.metric in ("sop", "pnsc"):
        if not s.is_ratio:
            raise rd.error(f"metric {s.metric!r} needs a ratio variate 'main/wiretap'", section, "variate")
    elif s.metric != "op" and s.is_ratio:
        raise rd.error(f"metric {s.metric!r} is defined for product variates only", section, "variate")


def _grid(rd: _Reader) -> tuple:
    if not rd.cp.has_section("sweep"):
        return (0.0,)
    pts = rd.get("sweep", "points_db")
    if pts is not None:
        try:
            vals = tuple(float(v) for v in pts.split(",") if v.strip())
        except ValueError:
            raise rd.error(f"[sweep] points_db = {pts!r} is not a comma list of numbers", "sweep", "points_db") from None
        if not vals:
            raise rd.error("[sweep] points_db is empty", "sweep", "points_db")
        return vals
    start = rd.number("sweep", "start_db", required=True)
    stop = rd.number("sweep", "stop_db", default=start)
    step = rd.number("sweep", "step_db", default=1.0, check=lambda v: v > 0, what="must be positive")
    if stop < start:
        raise rd.error("[sweep] stop_db is below start_db", "sweep", "stop_db")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(float(v) for v in np.round(start + step * np.arange(count), 10))


def parse_config(text: str, path: str = "<config>") -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",),
                                   inline_comment_prefixes=("#",), empty_lines_in_values=False)
    try:
        cp.read_string(text, source=path)
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", exc.lineno, path) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key '{exc.option}' in [{exc.section}]", exc.lineno, path) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("content before the first [section] header", exc.lineno, path) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line (expected 'key = value' or '[section]')", lineno, path) from None
    lines = _Lines(text)
    rd = _Reader(cp, lines, path)

    known = {"run", "sweep", "mc", "meijer"}
    for sec in cp.sections():
        if sec in known or sec.startswith("channel.") or sec.startswith("series."):
            continue
        raise rd.error(f"unknown section [{sec}]", sec)

    method = (rd.get("run", "method", "mellin") if cp.has_section("run") else "mellin").lower()
    if method not in ("mellin", "combos"):
        raise rd.error(f"[run] method must be 'mellin' or 'combos', got {method!r}", "run", "method")
    terms = rd.number("run", "terms", 15, kind=int, check=lambda v: 1 <= v <= 64, what="must be in 1..64") \
        if cp.has_section("run") else 15
    mse_target = rd.number("run", "mse_target", None, check=lambda v: v > 0, what="must be positive") \
        if cp.has_section("run") else None
    metric = rd.get("run", "metric") if cp.has_section("run") else None
    if metric is not None:
        metric = metric.lower()
        if metric not in METRICS:
            raise rd.error(f"unknown metric {metric!r}; expected one of {', '.join(METRICS)}", "run", "metric")
    base_params = _metric_params(rd, "run", {}) if cp.has_section("run") else {}

    draws, seed = 0, 2024
    if cp.has_section("mc"):
        draws = rd.number("mc", "draws", 0, kind=int, check=lambda v: v >= 0, what="must be >= 0")
        seed = rd.number("mc", "seed", 2024, kind=int, check=lambda v: 0 <= v < 2 ** 64, what="must be a u64")

    channels = {}
    for sec in cp.sections():
        if not sec.startswith("channel."):
            continue
        cid = sec[len("channel."):]
        if not _ID_RE.match(cid):
            raise rd.error(f"channel id {cid!r} must be letters, digits or '_'", sec)
        model = (rd.get(sec, "model", required=True)).lower()
        if model not in _MODELS:
            raise rd.error(f"unknown channel model {model!r}; expected bx or alems", sec, "model")
        params = {}
        for key in _MODELS[model]:
            params[key] = rd.number(sec, key, required=True)
        extra = set(cp.options(sec)) - set(_MODELS[model]) - {"model", "gbar_db", "snr", "terms", "corrupt_beta"}
        if extra:
            key = sorted(extra)[0]
            raise rd.error(f"unknown key '{key}' for a {model} channel", sec, key)
        raw = rd.get(sec, "gbar_db", "0").lower()
        m = _SWEEP_RE.match(raw)
        if m:
            swept = True
            off = float(m.group(2)) if m.group(2) else 0.0
            gbar_db = -off if m.group(1) == "-" else off
        else:
            swept = False
            gbar_db = rd.number(sec, "gbar_db")
        snr = rd.get(sec, "snr", "mean").lower()
        if snr not in ("mean", "parameter"):
            raise rd.error(f"snr must be 'mean' or 'parameter', got {snr!r}", sec, "snr")
        ch_terms = rd.number(sec, "terms", None, kind=int, check=lambda v: 1 <= v <= 64, what="must be in 1..64")
        corrupt = rd.number(sec, "corrupt_beta", 0.0)
        channels[cid] = ChannelSpec(cid, model, params, gbar_db, swept, snr, ch_terms, corrupt)

    series = []
    for sec in cp.sections():
        if not sec.startswith("series."):
            continue
        name = sec[len("series."):]
        if not _ID_RE.match(name):
            raise rd.error(f"series name {name!r} must be letters, digits or '_'", sec)
        s_metric = (rd.get(sec, "metric") or metric or "").lower()
        if not s_metric:
            raise rd.error("no metric in [run] or in this series", sec)
        if s_metric not in METRICS:
            raise rd.error(f"unknown metric {s_metric!r}", sec, "metric")
        hops = _parse_variate(rd, sec, rd.get(sec, "variate", required=True), channels)
        s = SeriesSpec(name, hops, s_metric, _metric_params(rd, sec, base_params))
        _check_series(rd, s)
        series.append(s)

    meijer_spec = None
    if cp.has_section("meijer"):
        meijer_spec = {}
        for key in ("m", "n", "p", "q"):
            meijer_spec[key] = rd.number("meijer", key, required=True, kind=int, check=lambda v: v >= 0,
                                         what="must be >= 0")
        for key in ("a", "b"):
            raw = rd.get("meijer", key, "")
            try:
                meijer_spec[key] = tuple(float(v) for v in raw.split(",") if v.strip())
            except ValueError:
                raise rd.error(f"[meijer] {key} must be a comma list of numbers", "meijer", key) from None
        meijer_spec["z"] = rd.number("meijer", "z", required=True, check=lambda v: v > 0, what="must be positive")

    return RunConfig(path, method, terms, mse_target, _grid(rd), draws, seed, channels,
                     tuple(series), meijer_spec)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, path) from None
    return parse_config(text, path)
