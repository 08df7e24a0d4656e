"""Persistence: spectrum caches, resonance catalogs, evaluation grids and
verification reports.

JSON for structured catalogs, CSV for grids. Numeric fields are serialized
at 15 significant digits, which round-trips our doubles in practice (the
loaders re-serialize bit-identically). Writers are atomic (temp file +
rename). Every artifact embeds the library version, the model descriptor
and the truncation policy so reports are self-describing; the generated_at
timestamp is excluded from determinism comparisons.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
import time

from . import __version__
from .errors import ParseError, SchemaMismatch
from .groups import LengthSpectrum
from .zeta import ResonanceSet, TruncationPolicy

SCHEMA_VERSION = 1

_SPECTRUM_FIELDS = {"schema_version", "kind", "generated_at", "library_version",
                    "model", "lmax", "convention", "complete", "entries", "certificate"}
_CATALOG_FIELDS = {"schema_version", "kind", "generated_at", "library_version",
                   "model", "box", "source", "points", "truncation"}


def fmt15(x):
    """15-significant-digit decimal form used for all numeric payloads."""
    return float(format(float(x), ".15g"))


def _atomic_write_text(path, text):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(payload, path):
    _atomic_write_text(path, json.dumps(payload, indent=1, sort_keys=True) + "\n")


def _load_json(path, kind, allowed_fields):
    with open(path, "r") as fh:
        raw = fh.read()
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg} at byte {exc.pos}", offset=exc.pos)
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"schema_version {payload.get('schema_version')} != {SCHEMA_VERSION}")
    if payload.get("kind") != kind:
        raise SchemaMismatch(f"kind {payload.get('kind')!r}, expected {kind!r}")
    unknown = set(payload) - allowed_fields
    if unknown:
        raise SchemaMismatch(f"unknown field(s): {', '.join(sorted(unknown))}")
    return payload


def _header(kind, model_descriptor):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "library_version": __version__,
        "model": model_descriptor,
    }


def save_spectrum(spectrum: LengthSpectrum, path, model_descriptor=""):
    payload = _header("spectrum", model_descriptor)
    payload.update({
        "lmax": fmt15(spectrum.L_max),
        "convention": "oriented" if spectrum.oriented else "unoriented",
        "complete": bool(spectrum.complete),
        "entries": [[fmt15(l), int(m)] for l, m in spectrum.entries],
        "certificate": _jsonable(spectrum.certificate),
    })
    _dump_json(payload, path)


def load_spectrum(path) -> LengthSpectrum:
    payload = _load_json(path, "spectrum", _SPECTRUM_FIELDS)
    return LengthSpectrum(
        entries=tuple((fmt15(l), int(m)) for l, m in payload["entries"]),
        L_max=fmt15(payload["lmax"]),
        complete=bool(payload["complete"]),
        oriented=payload["convention"] == "oriented",
        certificate=payload.get("certificate") or {},
    )


def save_catalog(rset: ResonanceSet, path, model_descriptor="", truncation=None):
    payload = _header("catalog", model_descriptor or rset.meta.get("model", ""))
    payload.update({
        "box": [fmt15(v) for v in rset.box] if rset.box else None,
        "source": rset.source,
        "points": [[fmt15(z.real), fmt15(z.imag), int(m)] for z, m in rset.points],
        "truncation": _jsonable(truncation if truncation is not None
                                else rset.meta.get("truncation_radius")),
    })
    _dump_json(payload, path)


def load_catalog(path) -> ResonanceSet:
    payload = _load_json(path, "catalog", _CATALOG_FIELDS)
    pts = tuple((complex(fmt15(re), fmt15(im)), int(m)) for re, im, m in payload["points"])
    box = tuple(fmt15(v) for v in payload["box"]) if payload.get("box") else None
    meta = {"model": payload.get("model", "")}
    if payload.get("truncation") is not None:
        meta["truncation_radius"] = payload["truncation"]
    return ResonanceSet(pts, box, "Loaded", meta)


def save_eval_csv(rows, path):
    """rows: iterables of (re_s, im_s, re_value, im_value, tail_bound)."""
    lines = ["re_s,im_s,re_value,im_value,tail_bound"]
    for r in rows:
        lines.append(",".join(format(float(v), ".15g") for v in r))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def load_eval_csv(path):
    with open(path, "r") as fh:
        reader = csv.DictReader(fh)
        return [tuple(float(row[k]) for k in
                      ("re_s", "im_s", "re_value", "im_value", "tail_bound"))
                for row in reader]


def save_verify_report(results, path, suite, model_descriptor=""):
    """results: list of dicts with identity, residual, tolerance, passed."""
    payload = _header("verify-report", model_descriptor)
    payload["suite"] = suite
    payload["checks"] = [
        {
            "identity": r["identity"],
            "residual": fmt15(r["residual"]),
            "tolerance": fmt15(r["tolerance"]),
            "passed": bool(r["passed"]),
            "detail": r.get("detail", ""),
        }
        for r in results
    ]
    payload["all_passed"] = all(r["passed"] for r in results)
    # report schema is open-ended: no strict loader, write-only artifact
    _dump_json(payload, path)


def save_fit_json(fit, path, model_descriptor=""):
    payload = _header("asymptotic-fit", model_descriptor)
    payload.update({
        "chi_est": fmt15(fit.chi_est),
        "n_c_est": fmt15(fit.n_c_est),
        "quad_coeffs": [fmt15(c) for c in fit.quad_coeffs],
        "log_coeff": fmt15(fit.log_coeff),
        "residual": fmt15(fit.residual),
    })
    _dump_json(payload, path)


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return str(obj)
