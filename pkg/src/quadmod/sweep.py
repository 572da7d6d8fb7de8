"""Parameter sweeps over H, one CSV row per value."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .config import COLUMNS, SweepConfig
from .modulus_fd import make_quad, modulus_exterior, modulus_g1h, modulus_interior
from .rectangle_moduli import ext_modulus_rectangle
from .slit_bounds import aspect_residual, g1h_star_modulus, g2h_modulus, g2h_solve

__all__ = ["CsvRow", "run_sweep", "write_csv", "format_number"]


@dataclass
class CsvRow:
    """Values of one sweep row; absent entries are serialized as empty fields."""

    H: float
    values: dict[str, float] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)

    def get(self, name: str) -> float | None:
        return self.H if name == "H" else self.values.get(name)


def format_number(v: float | None) -> str:
    if v is None:
        return ""
    return format(v, ".17g")


def _try(row: CsvRow, name: str, fn):
    try:
        v = fn()
    except Exception as exc:  # recorded per row, the sweep continues
        row.errors.append(f"{name}: {type(exc).__name__}: {exc}")
        return None
    if v is not None and not math.isfinite(v):
        row.errors.append(f"{name}: non-finite value")
        return None
    if v is not None:
        row.values[name] = v
    return v


def _fd(row: CsvRow, name: str, fn):
    def inner():
        est = fn()
        row.values[name + "_err"] = est.err_est
        if not est.converged:
            row.errors.append(f"{name}: not converged (err_est {est.err_est:.3g})")
        for w in est.warnings:
            row.errors.append(f"{name}: {w}")
        return est.value

    return _try(row, name, inner)


def _ratio(row: CsvRow, name: str, num: str, den: str):
    a, b = row.values.get(num), row.values.get(den)
    if a is not None and b:
        row.values[name] = a / b


def compute_row(cfg: SweepConfig, H: float, fd: bool) -> CsvRow:
    row = CsvRow(H=H)
    quad = make_quad(cfg.quad_catalog_id, cfg.alpha, cfg.quad_height)
    alpha, beta = quad.alpha, quad.beta
    _try(row, "ext_analytic_rect", lambda: ext_modulus_rectangle(H * alpha / beta))

    def lower():
        p = g2h_solve(alpha, beta, H)
        row.values["g2h_residual"] = aspect_residual(p)
        return g2h_modulus(p)

    _try(row, "g2h_lower", lower)
    if H > 1:
        row.values["asymptote"] = math.log(H) / math.pi
    kw = dict(tol=cfg.fd_tolerance, budget=cfg.grid_budget)
    if cfg.M is not None:
        if fd:
            _fd(row, "g1h_upper", lambda: modulus_g1h(alpha, beta, cfg.M, H, **kw))
        else:
            _try(row, "g1h_upper", lambda: g1h_star_modulus(alpha, cfg.M, H))
    if fd:
        _fd(row, "ext_fd", lambda: modulus_exterior(quad, H, **kw))
        _fd(row, "interior_fd", lambda: modulus_interior(quad, H, **kw))
    _ratio(row, "ext_rect_ratio", "ext_analytic_rect", "asymptote")
    _ratio(row, "g2h_ratio", "g2h_lower", "asymptote")
    _ratio(row, "ext_fd_ratio", "ext_fd", "asymptote")
    _ratio(row, "g1h_ratio", "g1h_upper", "asymptote")
    return row


def _row_task(args):
    cfg, H, fd = args
    return compute_row(cfg, H, fd)


def run_sweep(cfg: SweepConfig, fd: bool = False, workers: int = 1) -> list[CsvRow]:
    """One row per H, computed independently and returned in increasing H."""
    tasks = [(cfg, H, fd) for H in cfg.H_values]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row_task, tasks))
    else:
        rows = [_row_task(t) for t in tasks]
    return sorted(rows, key=lambda r: r.H)


def write_csv(rows: list[CsvRow], outputs=COLUMNS, stream=None) -> str:
    """Serialize rows with the selected columns; ``error`` is appended when not selected."""
    cols = list(outputs) if "error" in outputs else list(outputs) + ["error"]
    buf = io.StringIO() if stream is None else stream
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow(["; ".join(r.errors) if c == "error" else format_number(r.get(c)) for c in cols])
    return buf.getvalue() if stream is None else ""
