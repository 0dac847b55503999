"""Scenario files, the check runner and report writing.

A scenario is an INI file::

    [scenario]
    name = sphere_cp2
    description = geodesic sphere of radius pi/3 in CP^2
    seed = 0

    [space]
    model = cp
    n = 2

    [object]
    kind = sphere            ; sphere | tube | custom_chart | variety
    radius = pi/3

    [grid]
    counts = 5, 5, 4

    [checks]
    run = spectrum, hopf, identities, miquel

    [tolerances]
    spectrum = 1e-5

Numbers accept ``pi`` and the four arithmetic operators.  Relative file
names are resolved against the scenario file.
"""

from __future__ import annotations

import ast
import configparser
import csv
import io
import json
import math
import operator
import runpy
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from .duality import (
    biduality_spot_check,
    gauss_point,
    sample_smooth_points,
    singular_locus_probe,
    tube_duality_check,
)
from .hypersurface import (
    HypersurfacePatch,
    hopf_report,
    lemma4_residuals,
    miquel_bound,
    miquel_check,
    spectrum,
    structure_tensors,
)
from .polynomial import AlgebraicHypersurface, load_polynomial
from .space_forms import CH, CP, coords_distance
from .tubes import (
    MonomialCurve,
    TubeSpec,
    algebraic_base,
    complex_linear_base,
    focal_radii,
    point_base,
    rank_sweep,
    real_form_base,
    sextic_focal_curve,
    singular_blowup_probe,
    sphere_chart_mp,
)
from .hpfd import shape_operator_hp

CHECKS = (
    "spectrum", "hopf", "structure", "identities", "tube_spectrum", "focal_sweep", "miquel",
    "gauss", "tube_duality", "biduality", "singular_locus", "blowup",
)

DEFAULT_TOLERANCES = {
    "spectrum": 1e-5,
    "hopf": 1e-6,
    "constancy": 1e-6,
    "structure": 1e-9,
    "identities": 1e-5,
    "pairing": 1e-5,
    "tube_spectrum": 1e-5,
    "miquel": 1e-9,
    "gauss": 1e-9,
    "duality": 1e-8,
    "biduality": 1e-7,
    "singular": 1e-6,
}

# tolerances replaced by the --tol flag
COMPARISON_KEYS = ("spectrum", "identities", "pairing", "tube_spectrum")


class ScenarioError(ValueError):
    """Invalid scenario file; ``line`` points at the offending entry when known."""

    def __init__(self, message: str, line: Optional[int] = None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip())


# -- small parsers ---------------------------------------------------------

_OPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.Div: operator.truediv, ast.Pow: operator.pow, ast.USub: operator.neg, ast.UAdd: operator.pos,
}


def parse_number(text: str) -> float:
    """Real number; ``pi`` and ``+ - * / **`` are allowed."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"not a number: {text!r}")

    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ZeroDivisionError, TypeError):
        raise ValueError(f"not a number: {text!r}") from None


def parse_list(text: str, item=parse_number) -> list:
    return [item(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]


def parse_complex(text: str) -> complex:
    return complex(text.strip().replace(" ", "").replace("i", "j"))


# -- scenario --------------------------------------------------------------

@dataclass
class Scenario:
    name: str
    description: str
    seed: int
    model: str
    n: int
    object: dict
    checks: list
    grid: list
    tolerances: dict
    options: dict
    path: Optional[Path] = None
    lines: dict = field(default_factory=dict, repr=False)

    @property
    def space(self):
        return CP(self.n) if self.model == "cp" else CH(self.n)

    def echo(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "seed": self.seed,
            "space": {"model": self.model, "n": self.n},
            "object": dict(sorted(self.object.items())),
            "checks": list(self.checks),
            "grid": list(self.grid),
            "tolerances": dict(sorted(self.tolerances.items())),
            "options": dict(sorted(self.options.items())),
        }

    def error(self, message: str, section: str, key: Optional[str] = None) -> ScenarioError:
        return ScenarioError(message, self.lines.get((section, key)) or self.lines.get((section, None)), self.path)

    def resolve(self, name: str) -> Path:
        p = Path(name)
        if not p.is_absolute() and self.path is not None:
            p = self.path.parent / p
        return p


def _key_lines(text: str) -> dict:
    """Line numbers of section headers and keys, keyed by (section, key)."""
    out = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            out[(section, None)] = lineno
        elif line and line[0] not in "#;" and section is not None:
            for sep in "=:":
                if sep in line:
                    out[(section, line.split(sep, 1)[0].strip().lower())] = lineno
                    break
    return out


def parse_scenario(text: str, path=None) -> Scenario:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        parser.read_string(text, source=str(path) if path else "<scenario>")
    except configparser.MissingSectionHeaderError as exc:
        raise ScenarioError("expected a [section] header", exc.lineno, path) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ScenarioError("malformed line (expected 'key = value')", lineno, path) from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ScenarioError(exc.message.split(": ", 1)[-1], exc.lineno, path) from None
    lines = _key_lines(text)
    path = Path(path) if path else None

    def err(message, section, key=None):
        return ScenarioError(message, lines.get((section, key)) or lines.get((section, None)), path)

    for sec in ("scenario", "space", "object"):
        if not parser.has_section(sec):
            raise ScenarioError(f"missing section [{sec}]", None, path)

    def get(section, key, conv=str, default=None, required=False):
        if not parser.has_option(section, key):
            if required:
                raise err(f"missing key '{key}'", section)
            return default
        raw = parser.get(section, key)
        try:
            return conv(raw)
        except ValueError as exc:
            raise err(f"bad value for '{key}': {exc}", section, key) from None

    name = get("scenario", "name", required=True)
    model = get("space", "model", str.lower, required=True)
    if model not in ("cp", "ch"):
        raise err("model must be 'cp' or 'ch'", "space", "model")
    n = get("space", "n", int, required=True)
    if n < 1:
        raise err("n must be at least 1", "space", "n")

    obj = dict(parser.items("object"))
    kind = obj.get("kind", "").lower()
    if kind not in ("sphere", "tube", "custom_chart", "variety"):
        raise err("kind must be one of sphere, tube, custom_chart, variety", "object", "kind")
    if "radius" in obj:
        try:
            r = parse_number(obj["radius"])
        except ValueError as exc:
            raise err(str(exc), "object", "radius") from None
        if r <= 0 or (model == "cp" and r >= math.pi / 2):
            raise err(f"radius {r} out of range for {model.upper()}^{n}", "object", "radius")
    elif kind in ("sphere", "tube"):
        raise err("missing key 'radius'", "object")
    for key in ("polynomial", "file"):
        if key in obj and not (path.parent / obj[key] if path else Path(obj[key])).exists():
            raise err(f"file not found: {obj[key]}", "object", key)

    checks = get("checks", "run", lambda s: [c.strip() for c in s.split(",") if c.strip()], default=[]) \
        if parser.has_section("checks") else []
    for c in checks:
        if c not in CHECKS:
            raise err(f"unknown check '{c}' (known: {', '.join(CHECKS)})", "checks", "run")

    grid = []
    if parser.has_section("grid"):
        grid = get("grid", "counts", lambda s: [int(parse_number(t)) for t in s.split(",") if t.strip()], default=[])

    tolerances = dict(DEFAULT_TOLERANCES)
    if parser.has_section("tolerances"):
        for key, raw in parser.items("tolerances"):
            if key not in DEFAULT_TOLERANCES:
                raise err(f"unknown tolerance '{key}'", "tolerances", key)
            try:
                tolerances[key] = parse_number(raw)
            except ValueError as exc:
                raise err(str(exc), "tolerances", key) from None

    options = {}
    for sec in parser.sections():
        if sec not in ("scenario", "space", "object", "checks", "grid", "tolerances"):
            for key, raw in parser.items(sec):
                options[f"{sec}.{key}"] = raw

    return Scenario(
        name=name,
        description=get("scenario", "description", default=""),
        seed=get("scenario", "seed", int, default=0),
        model=model, n=n, object=obj, checks=checks, grid=grid,
        tolerances=tolerances, options=options, path=path, lines=lines,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", None, path) from None
    return parse_scenario(text, path)


# -- canned scenarios ------------------------------------------------------

def canned_dir() -> Path:
    return Path(resources.files("hopflab") / "canned")


def list_scenarios(custom_dir=None) -> list:
    """(name, description, path) for the bundled scenarios plus any in ``custom_dir``."""
    dirs = [canned_dir()]
    if custom_dir is not None:
        dirs.append(Path(custom_dir))
    out = []
    for d in dirs:
        for p in sorted(d.glob("*.cfg")):
            try:
                sc = load_scenario(p)
                out.append((sc.name, sc.description, p))
            except ScenarioError as exc:
                out.append((p.stem, f"(invalid: {exc})", p))
    return out


def find_scenario(name_or_path) -> Path:
    p = Path(name_or_path)
    if p.exists():
        return p
    cand = canned_dir() / f"{name_or_path}.cfg"
    if cand.exists():
        return cand
    raise ScenarioError(f"no such scenario file or canned scenario: {name_or_path}")


# -- building the geometric object -----------------------------------------

def _complex_vector(text: str) -> np.ndarray:
    return np.array(parse_list(text, parse_complex), dtype=complex)


def _polynomial(sc: Scenario, key: str = "polynomial") -> AlgebraicHypersurface:
    if key not in sc.object:
        raise sc.error(f"missing key '{key}'", "object")
    return load_polynomial(sc.resolve(sc.object[key]))


def _base_point(sc: Scenario, f: AlgebraicHypersurface, rng) -> np.ndarray:
    if "base_point" in sc.object:
        x = _complex_vector(sc.object["base_point"])
        if len(x) != f.nvars:
            raise sc.error("base_point has the wrong length", "object", "base_point")
        return x / np.linalg.norm(x)
    return sample_smooth_points(f, 1, rng)[0]


@dataclass
class Built:
    patch: Optional[HypersurfacePatch] = None
    tube: Optional[TubeSpec] = None
    predicted: Optional[Callable] = None  # params -> spectrum for patch's orientation
    variety: Optional[AlgebraicHypersurface] = None


def build(sc: Scenario, fd_step: Optional[float] = None) -> Built:
    space = sc.space
    obj = sc.object
    kind = obj["kind"].lower()
    h = fd_step if fd_step is not None else parse_number(obj.get("fd_step", "1e-4"))
    orientation = obj.get("orientation", "inward")
    rng = np.random.default_rng(sc.seed)
    if kind == "variety":
        f = _polynomial(sc)
        if f.nvars != sc.n + 1:
            raise sc.error(f"polynomial has {f.nvars} variables, expected {sc.n + 1}", "object", "polynomial")
        return Built(variety=f)
    if kind == "custom_chart":
        if "file" not in obj:
            raise sc.error("missing key 'file'", "object")
        ns = runpy.run_path(str(sc.resolve(obj["file"])))
        if "chart" not in ns or "domain_box" not in ns:
            raise sc.error("chart file must define chart(u) and domain_box", "object", "file")
        patch = HypersurfacePatch(space, ns["chart"], ns["domain_box"], h, orientation,
                                  normal_hint=ns.get("normal_hint"), name=sc.name)
        expected = None
        if "expected" in obj:
            vals = np.sort(parse_list(obj["expected"]))
            expected = lambda u: vals  # noqa: E731
        return Built(patch=patch, predicted=expected)

    r = parse_number(obj["radius"])
    if kind == "sphere":
        center = _complex_vector(obj["center"]) if "center" in obj else None
        base = point_base(space, center)
    else:
        bkind = obj.get("base", "").lower()
        if bkind == "point":
            base = point_base(space)
        elif bkind == "complex_linear":
            base = complex_linear_base(space, int(obj.get("k", "1")))
        elif bkind == "real_form":
            base = real_form_base(space)
        elif bkind == "algebraic":
            f = _polynomial(sc)
            base = algebraic_base(f, _base_point(sc, f, rng), float(parse_number(obj.get("half_width", "0.15"))), space)
        else:
            raise sc.error("base must be one of point, complex_linear, real_form, algebraic", "object", "base")
    spec = TubeSpec(base, r)
    patch = spec.patch(orientation, h)
    sign = -1.0 if orientation == "inward" else 1.0
    predicted = lambda u: np.sort(sign * spec.predicted(u))  # noqa: E731
    variety = base.payload if isinstance(base.payload, AlgebraicHypersurface) else None
    return Built(patch=patch, tube=spec, predicted=predicted, variety=variety)


# -- checks ----------------------------------------------------------------

@dataclass
class CheckResult:
    status: str  # pass | fail | skipped | error
    metrics: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "skipped")

    def as_dict(self) -> dict:
        out = {"status": self.status, "metrics": self.metrics}
        if self.tables:
            out["tables"] = self.tables
        if self.message:
            out["message"] = self.message
        return out


def _table(columns, rows) -> dict:
    return {"columns": list(columns), "rows": [list(r) for r in rows]}


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


class Runner:
    def __init__(self, sc: Scenario, built: Built):
        self.sc = sc
        self.b = built
        self.tol = sc.tolerances
        self._grid = None
        self._spectra = None

    # shared data
    @property
    def grid(self) -> np.ndarray:
        if self._grid is None:
            p = self.b.patch
            counts = self.sc.grid or [2] * p.dim
            if len(counts) == 1:
                counts = counts * p.dim
            if len(counts) != p.dim:
                raise self.sc.error(f"grid needs {p.dim} counts", "grid", "counts")
            self._grid = p.sample_grid(counts)
        return self._grid

    @property
    def spectra(self) -> list:
        if self._spectra is None:
            self._spectra = [spectrum(self.b.patch, u) for u in self.grid]
        return self._spectra

    def rng(self, tag: int) -> np.random.Generator:
        return np.random.default_rng([self.sc.seed, tag])

    def opt(self, key: str, default: str) -> str:
        return self.sc.options.get(key, default)

    def need(self, what: str):
        if what == "patch" and self.b.patch is None:
            raise Inapplicable("needs a hypersurface (sphere, tube or custom chart)")
        if what == "variety" and self.b.variety is None:
            raise Inapplicable("needs an algebraic variety")

    def run(self, name: str) -> CheckResult:
        try:
            return getattr(self, f"check_{name}")()
        except Inapplicable as exc:
            return CheckResult("skipped", message=str(exc))
        except ScenarioError:
            raise
        except Exception as exc:  # recorded in the report, never swallowed silently
            return CheckResult("error", message=f"{type(exc).__name__}: {exc}")

    # individual checks
    def check_spectrum(self) -> CheckResult:
        self.need("patch")
        u = self.b.patch.domain_box.mean(axis=1)
        sp = spectrum(self.b.patch, u)
        metrics = {
            "mu": sp.mu, "hopf_defect": sp.hopf_defect, "mean_curvature": sp.mean_curvature,
            "eigenvalues": sp.eigenvalues.tolist(),
        }
        rows = [[i, float(v)] for i, v in enumerate(sp.eigenvalues)]
        if self.b.predicted is None:
            return CheckResult("pass", metrics, {"spectrum": _table(["index", "computed"], rows)})
        pred = self.b.predicted(u)
        err = float(np.max(np.abs(pred - sp.eigenvalues)))
        metrics.update({"predicted": pred.tolist(), "max_error": err})
        rows = [[i, float(v), float(p)] for i, (v, p) in enumerate(zip(sp.eigenvalues, pred))]
        return CheckResult(_verdict(err <= self.tol["spectrum"]), metrics,
                           {"spectrum": _table(["index", "computed", "predicted"], rows)})

    def check_hopf(self) -> CheckResult:
        self.need("patch")
        rep = hopf_report(self.b.patch, self.grid, self.tol["hopf"])
        m = rep.as_dict()
        ok = rep.is_hopf and rep.mu_std <= self.tol["constancy"]
        return CheckResult(_verdict(ok), m)

    def check_structure(self) -> CheckResult:
        self.need("patch")
        worst = {}
        for sp in self.spectra:
            for k, v in structure_tensors(sp.frame).residuals().items():
                worst[k] = max(worst.get(k, 0.0), v)
        return CheckResult(_verdict(max(worst.values()) <= self.tol["structure"]), worst)

    def check_identities(self) -> CheckResult:
        self.need("patch")
        ident, pair, applicable = 0.0, 0.0, 0
        for sp in self.spectra:
            res = lemma4_residuals(self.b.patch, None, self.tol["hopf"], sp=sp)
            ident = max(ident, res.identity_a_residual)
            if res.pairing_residual is not None:
                applicable += 1
                pair = max(pair, res.pairing_residual)
        ok = ident <= self.tol["identities"] and pair <= self.tol["pairing"]
        return CheckResult(_verdict(ok), {
            "points": len(self.spectra), "identity_residual": ident,
            "pairing_residual": pair if applicable else None, "pairing_points": applicable,
        })

    def check_tube_spectrum(self) -> CheckResult:
        self.need("patch")
        if self.b.predicted is None:
            raise Inapplicable("no closed-form spectrum for this object")
        worst = 0.0
        for u, sp in zip(self.grid, self.spectra):
            worst = max(worst, float(np.max(np.abs(self.b.predicted(u) - sp.eigenvalues))))
        return CheckResult(_verdict(worst <= self.tol["tube_spectrum"]), {"points": len(self.grid), "max_error": worst})

    def check_focal_sweep(self) -> CheckResult:
        self.need("patch")
        patch = self.b.patch
        if self.sc.model != "cp":
            raise Inapplicable("focal sweep is set up for CP^n")
        steps = int(self.opt("sweep.steps", "50"))
        eps = 1e-9
        edges = np.linspace(eps, np.pi - eps, steps + 1)
        pts = self.grid[: int(self.opt("sweep.points", "3"))]
        radii = focal_radii(self.spectra[0])
        full = patch.dim
        rows = rank_sweep(patch, edges, pts)
        focal = [(r, mult, src) for r, mult, src in radii.radii]
        ok = True
        table = []
        dips = []
        for i, row in enumerate(rows):
            inside = [f for f in focal if row.r_lo <= f[0] < row.r_hi]
            dip = row.min_rank < full
            if bool(inside) != dip:
                ok = False
            if dip:
                dips.append(i)
                if row.min_rank % 2:
                    ok = False
            table.append([i, row.r_lo, row.r_hi, row.r_star, row.min_rank, row.max_rank,
                          ";".join(f"{f[0]:.12g}" for f in inside)])
        return CheckResult(_verdict(ok), {
            "focal_radii": [[float(r), int(m), s] for r, m, s in focal],
            "dip_cells": dips, "full_rank": full, "steps": steps,
            "dip_ranks": [rows[i].min_rank for i in dips],
        }, {"sweep": _table(["cell", "r_lo", "r_hi", "r_star", "min_rank", "max_rank", "focal_inside"], table)})

    def check_miquel(self) -> CheckResult:
        self.need("patch")
        if self.sc.model != "cp":
            raise Inapplicable("the Miquel bound is stated for CP^n")
        # satisfied | equality | report (the bound is a hypothesis of a rigidity
        # statement, so non-spheres may violate it legitimately)
        expect = self.opt("miquel.expect", "satisfied").lower()
        if expect not in ("satisfied", "equality", "report"):
            raise self.sc.error("miquel.expect must be satisfied, equality or report", "miquel", "expect")
        tube = self.b.tube
        if tube is not None and tube.base.kind == "point":
            # spheres: extended-precision shape operator, so equality is testable at 1e-9
            chart, hint = sphere_chart_mp(tube)
            tol = self.tol["miquel"]
            results = []
            for u in self.grid[:: max(1, len(self.grid) // 8)]:
                A, U = shape_operator_hp(chart, list(u), h=1e-15, dps=60, hint=hint, return_u=True)
                if self.b.patch.normal_orientation == "outward":
                    A = -A
                results.append(miquel_bound(float(U @ A @ U), float(np.trace(A) / A.shape[0]), self.sc.n, tol))
            precision = "extended"
        else:
            # double-precision finite differences: noise ~1e-7, so compare at the spectral tolerance
            tol = self.tol["spectrum"]
            results = [miquel_check(sp, tol=tol) for sp in self.spectra]
            precision = "double"
        gap, sat, used = 0.0, True, 0
        for res in results:
            if not res.applicable:
                continue
            used += 1
            sat = sat and bool(res.satisfied)
            gap = max(gap, abs(res.lhs - res.rhs))
        ok = expect == "report" or (sat and (gap <= tol if expect == "equality" else True))
        return CheckResult(_verdict(ok), {
            "points": used, "satisfied": sat, "max_gap": gap, "expect": expect,
            "precision": precision, "tolerance": tol,
        })

    def check_gauss(self) -> CheckResult:
        self.need("variety")
        f = self.b.variety
        xs = sample_smooth_points(f, int(self.opt("duality.samples", "50")), self.rng(1))
        space = CP(f.nvars - 1)
        worst, orth = 0.0, 0.0
        for x in xs:
            y = gauss_point(f, x)
            worst = max(worst, abs(coords_distance(space, x, y.coords) - np.pi / 2))
            orth = max(orth, abs(np.vdot(y.coords, x)))
        return CheckResult(_verdict(worst <= self.tol["gauss"]),
                           {"samples": len(xs), "max_distance_error": worst, "max_inner_product": orth})

    def check_tube_duality(self) -> CheckResult:
        self.need("variety")
        f = self.b.variety
        count = int(self.opt("duality.radii", "20"))
        radii = np.linspace(0.05, np.pi / 2 - 0.05, count)
        rows = []
        direct = 0.0
        for i, r in enumerate(radii):
            res = tube_duality_check(f, float(r), int(self.opt("duality.tube_samples", "5")),
                                     self.rng(100 + i), int(self.opt("duality.dense", "200")))
            direct = max(direct, res.max_direct_residual)
            rows.append([float(r), res.max_direct_residual, res.max_membership_residual])
        return CheckResult(_verdict(direct <= self.tol["duality"]),
                           {"radii": count, "max_direct_residual": direct,
                            "max_membership_residual": max(r[2] for r in rows)},
                           {"tube_duality": _table(["r", "direct_residual", "membership_residual"], rows)})

    def check_biduality(self) -> CheckResult:
        self.need("variety")
        f = self.b.variety
        xs = sample_smooth_points(f, int(self.opt("duality.biduality_samples", "20")), self.rng(2))
        results = [biduality_spot_check(f, x, self.tol["biduality"]) for x in xs]
        if not any(r.applicable for r in results):
            raise Inapplicable(results[0].reason if results else "no samples")
        app = [r for r in results if r.applicable]
        passed = sum(bool(r.passed) for r in app)
        return CheckResult(_verdict(passed == len(app)), {
            "samples": len(results), "applicable": len(app), "passed": passed,
            "max_error": max(r.error for r in app), "method": app[0].method,
        })

    def check_singular_locus(self) -> CheckResult:
        self.need("variety")
        f = self.b.variety
        cands = singular_locus_probe(f)
        expect = [np.asarray(_complex_vector(s)) for s in self.opt("singular.expect", "").split("|") if s.strip()]
        found = []
        for e in expect:
            e = e / np.linalg.norm(e)
            d = min((coords_distance(CP(f.nvars - 1), e, c.point) for c in cands), default=np.inf)
            found.append(d <= self.tol["singular"])
        ok = all(found) if expect else not cands
        rows = [[_fmt_complex(c.point), c.f_residual, c.grad_residual] for c in cands]
        return CheckResult(_verdict(ok), {"candidates": len(cands), "expected_found": found},
                           {"candidates": _table(["point", "f_residual", "grad_residual"], rows)})

    def check_blowup(self) -> CheckResult:
        self.need("variety")
        f = self.b.variety
        r = parse_number(self.opt("blowup.radius", "0.5"))
        scales = parse_list(self.opt("blowup.scales", "1e-1, 3e-2, 1e-2, 3e-3, 1e-3"))
        P = _complex_vector(self.opt("blowup.point", "1, 0, 0, 0"))
        curve_kind = self.opt("blowup.curve", "focal")
        curve = _blowup_curve(curve_kind, f, r)
        values = singular_blowup_probe(f, P, r, scales, curve=curve)
        tail = [v for v in values[-3:] if v is not None]
        increasing = len(tail) == 3 and all(b > a for a, b in zip(tail, tail[1:]))
        final = values[-1]
        ok = increasing and final is not None and final > parse_number(self.opt("blowup.threshold", "1e3"))
        metrics = {"radius": r, "curve": curve_kind, "values": values, "tail_increasing": increasing}
        rows = [[s, v, "probe"] for s, v in zip(scales, values)]
        if "blowup.control_polynomial" in self.sc.options:
            g = load_polynomial(self.sc.resolve(self.opt("blowup.control_polynomial", "")))
            Q = _complex_vector(self.opt("blowup.control_point", ""))
            ctrl = singular_blowup_probe(g, Q, r, scales, curve=_blowup_curve("line", g, r), require_singular=False)
            bounded = all(v is not None and v <= 10 * ctrl[0] for v in ctrl)
            metrics.update({"control_values": ctrl, "control_bounded": bounded})
            ok = ok and bounded
            rows += [[s, v, "control"] for s, v in zip(scales, ctrl)]
        return CheckResult(_verdict(ok), metrics, {"blowup": _table(["scale", "max_abs_curvature", "series"], rows)})


class Inapplicable(Exception):
    pass


def _blowup_curve(kind: str, f: AlgebraicHypersurface, r: float) -> Optional[MonomialCurve]:
    if kind == "focal":
        return sextic_focal_curve(r)
    if kind == "line":
        return None
    raise ValueError(f"unknown approach curve {kind!r}")


def _fmt_complex(z) -> str:
    return " ".join(f"{complex(v).real:.9g}{complex(v).imag:+.9g}j" for v in z)


# -- reports ---------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


@dataclass
class Report:
    scenario: dict
    checks: dict
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(c["status"] in ("pass", "skipped") for c in self.checks.values())

    def as_dict(self) -> dict:
        return _clean({
            "tool": {"name": "hopflab", "version": self.version},
            "scenario": self.scenario,
            "checks": self.checks,
            "passed": self.passed,
        })

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        d = self.as_dict()
        sc = d["scenario"]
        lines = [
            f"hopflab {self.version}",
            f"scenario: {sc['name']} ({sc['space']['model'].upper()}^{sc['space']['n']}, seed {sc['seed']})",
        ]
        if sc["description"]:
            lines.append(f"  {sc['description']}")
        for name, c in d["checks"].items():
            lines.append(f"[{c['status'].upper():>7}] {name}")
            for k, v in sorted(c["metrics"].items()):
                lines.append(f"          {k} = {_short(v)}")
            if c.get("message"):
                lines.append(f"          note: {c['message']}")
        lines.append("result: " + ("PASS" if d["passed"] else "FAIL"))
        return "\n".join(lines) + "\n"

    def tables(self) -> dict:
        out = {}
        for name, c in self.as_dict()["checks"].items():
            for tname, t in c.get("tables", {}).items():
                buf = io.StringIO()
                w = csv.writer(buf, lineterminator="\n")
                w.writerow(t["columns"])
                w.writerows(t["rows"])
                out[f"{name}_{tname}.csv"] = buf.getvalue()
        return out

    def write(self, out_dir) -> list:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for fname, text in [("report.json", self.to_json()), ("report.txt", self.to_text())] + sorted(self.tables().items()):
            p = out_dir / fname
            p.write_text(text)
            written.append(p)
        return written


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list) and len(v) > 8:
        return "[" + ", ".join(_short(x) for x in v[:8]) + ", ...]"
    if isinstance(v, list):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


def run_scenario(sc: Scenario, seed: Optional[int] = None, fd_step: Optional[float] = None,
                 tol: Optional[float] = None) -> Report:
    """Execute every check named in the scenario and collect a report."""
    if seed is not None:
        sc.seed = int(seed)
    if tol is not None:
        for k in COMPARISON_KEYS:
            sc.tolerances[k] = float(tol)
    if fd_step is not None:
        sc.options["fd_step_override"] = repr(float(fd_step))
    built = build(sc, fd_step)
    runner = Runner(sc, built)
    results = {name: runner.run(name).as_dict() for name in sc.checks}
    return Report(sc.echo(), results)
