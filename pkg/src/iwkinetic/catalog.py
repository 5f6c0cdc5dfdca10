"""Observed high-wavenumber power laws of oceanic internal-wave spectra.

Each entry stores the slopes as quoted for the energy spectrum
``e(m, omega) ~ omega**-c m**-d`` (or a horizontal-wavenumber slope where
that is all that was reported) and, when both ``c`` and ``d`` are known,
the action exponents ``(a, b) = (c + 2, d - c)``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from iwkinetic.convergence import divergence_signs, ir_classify, opposite_signs, uv_classify
from iwkinetic.spectral import Exponents, map_energy_2d_to_action


@dataclass(frozen=True)
class Slope:
    """A quoted spectral slope, magnitude only (``x**-value``).

    ``lo``/``hi`` give a quoted range and ``uncertainty`` a quoted
    ``+-``; ``value`` is the midpoint of a range.
    """

    variable: str  # "m", "omega" or "k"
    value: float
    lo: float | None = None
    hi: float | None = None
    uncertainty: float | None = None

    def __post_init__(self):
        if self.variable not in ("m", "omega", "k"):
            raise ValueError(f"unknown slope variable {self.variable!r}")
        if (self.lo is None) != (self.hi is None):
            raise ValueError("a range needs both lo and hi")
        if self.lo is not None and not self.lo <= self.hi:
            raise ValueError("range must have lo <= hi")

    @classmethod
    def range(cls, variable, lo, hi):
        return cls(variable, 0.5 * (lo + hi), lo, hi)

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class Observation:
    program: str
    raw_exponents: tuple
    source_note: str = ""
    derived_ab: Exponents | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.derived_ab is None:
            c, d = self.slope("omega"), self.slope("m")
            if c is not None and d is not None:
                object.__setattr__(self, "derived_ab",
                                   map_energy_2d_to_action(c.value, d.value))

    def slope(self, variable) -> Slope | None:
        for s in self.raw_exponents:
            if s.variable == variable:
                return s
        return None

    def to_dict(self) -> dict:
        out = {"program": self.program,
               "raw_exponents": [s.to_dict() for s in self.raw_exponents],
               "source_note": self.source_note}
        if self.derived_ab is not None:
            out["a"], out["b"] = self.derived_ab.a, self.derived_ab.b
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Observation":
        slopes = tuple(Slope(**s) for s in d["raw_exponents"])
        return cls(d["program"], slopes, d.get("source_note", ""))


def _obs(program, c=None, d=None, note="", k=None, c_range=None):
    slopes = []
    if c_range is not None:
        slopes.append(Slope.range("omega", *c_range))
    elif c is not None:
        slopes.append(Slope("omega", c))
    if d is not None:
        slopes.append(Slope("m", d))
    if k is not None:
        slopes.append(Slope("k", k[0], uncertainty=k[1]))
    return Observation(program, tuple(slopes), note)


def builtin_catalog() -> list[Observation]:
    """The twelve observational points (ten programs, two of them twice)."""
    return [
        _obs("Site-D", 2.0, 2.0, "western North Atlantic north of the Gulf Stream"),
        _obs("FASINEX", 1.85, 2.3, "western North Atlantic south of the Gulf Stream"),
        _obs("IWEX", 1.75, k=(2.4, 0.4),
             note="horizontal-wavenumber slope only; no (a, b) derived"),
        _obs("SFTRE/PMIII", 1.9, 2.4, "western North Atlantic south of the Gulf Stream"),
        _obs("NATRE1", 1.35, 2.55, "eastern North Atlantic, observed"),
        _obs("NATRE2", 1.35, 2.75, "eastern North Atlantic, vortical mode removed"),
        _obs("PATCHEX1", d=1.75, c_range=(1.65, 2.0),
             note="eastern North Pacific; omega slope quoted as a range"),
        _obs("PATCHEX2", d=1.75, c_range=(1.65, 2.0),
             note="eastern North Pacific, two-dimensional displacement spectrum"),
        _obs("SWAPP", 2.0, 1.9, "eastern North Pacific, two-dimensional displacement spectrum"),
        _obs("STREX/OS", 2.2, 2.3, "eastern North Pacific"),
        _obs("MATE", 1.7, 2.1),
        _obs("AIWEX", 1.2, 2.25, "Arctic"),
    ]


REFERENCE_SPECTRA = {
    "PR": Exponents(3.5, 0.5),
    "C": Exponents(3.7, 0.0),
    "GM": Exponents(4.0, 0.0),
}


def classify_point(e: Exponents | None) -> dict:
    """Convergence verdicts and ID-line distances for one ``(a, b)``.

    Returns ``{"classifiable": False}`` when no exponents are available.
    """
    if e is None:
        return {"classifiable": False}
    ir, uv = ir_classify(e), uv_classify(e)
    s_ir, s_uv = divergence_signs(e)
    both = ir.status == "divergent" and uv.status == "divergent"
    return {
        "classifiable": True,
        "ir_status": ir.status, "ir_mechanism": ir.mechanism,
        "uv_status": uv.status, "uv_mechanism": uv.mechanism,
        "ir_sign": s_ir, "uv_sign": s_uv,
        "opposite_signs": opposite_signs(e),
        "same_sign_divergent": bool(both and s_ir * s_uv > 0),
        # perpendicular distances to b = 0 and 9 - 2a - 3b = 0
        "dist_b0": abs(e.b),
        "dist_flux_line": abs(9.0 - 2.0 * e.a - 3.0 * e.b) / np.sqrt(13.0),
    }


COLUMNS = ("name", "kind", "a", "b", "c", "d", "c_lo", "c_hi", "classifiable",
           "ir_status", "ir_mechanism", "ir_sign", "uv_status", "uv_mechanism",
           "uv_sign", "opposite_signs", "same_sign_divergent", "dist_b0",
           "dist_flux_line", "note")


def catalog_rows(observations=None) -> list[dict]:
    """Observation rows followed by the reference spectra."""
    rows = []
    for o in builtin_catalog() if observations is None else observations:
        c, d = o.slope("omega"), o.slope("m")
        row = {"name": o.program, "kind": "observation",
               "a": o.derived_ab.a if o.derived_ab else None,
               "b": o.derived_ab.b if o.derived_ab else None,
               "c": c.value if c else None, "d": d.value if d else None,
               "c_lo": c.lo if c else None, "c_hi": c.hi if c else None,
               "note": o.source_note}
        row.update(classify_point(o.derived_ab))
        rows.append(row)
    for name, e in REFERENCE_SPECTRA.items():
        row = {"name": name, "kind": "reference", "a": e.a, "b": e.b,
               "c": e.a - 2.0, "d": e.a - 2.0 + e.b, "c_lo": None, "c_hi": None,
               "note": ""}
        row.update(classify_point(e))
        rows.append(row)
    return [{k: r.get(k) for k in COLUMNS} for r in rows]


def export(fmt: str = "csv", observations=None) -> str:
    """Catalog with classifications as CSV or JSON text."""
    rows = catalog_rows(observations)
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=False) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else v) for k, v in r.items()})
    return buf.getvalue()


def dump_observations(observations) -> str:
    """Observations in the loadable JSON schema."""
    return json.dumps([o.to_dict() for o in observations], indent=2) + "\n"


def load_observations(text_or_path) -> list[Observation]:
    """Read observations written by :func:`dump_observations`."""
    text = str(text_or_path)
    if not text.lstrip().startswith("["):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    return [Observation.from_dict(d) for d in json.loads(text)]
