"""JSON and CSV serialization with lossless doubles.

Floats are written with 17 significant digits, which round-trips every IEEE
double.  Files are written atomically: content goes to a temporary file in the
target directory which then replaces the destination, so a failed run leaves
no partial output.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import os
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from .convex import ConvexTarget
from .errors import SignedUDError, ValidationError
from .finite import AtomSequence
from .measures import FiniteSignedMeasure, PLJFunction, SignDensity
from .merge import BlockPlan
from .sequences import ArrangementSchedule, SignedPrefix


class InputOutputError(SignedUDError, OSError):
    """Unreadable or unwritable file."""


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"cannot serialize non-finite value {x!r}")
    text = format(x, ".17g")
    # Keep integral values recognizably floating point ("1.0", not "1").
    return text if any(c in text for c in ".en") else text + ".0"


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _emit(obj: Any, out: list[str], indent: int | None, level: int) -> None:
    # json.dumps offers no control over float formatting, hence this small emitter.
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), out, indent, level)
    elif isinstance(obj, dict):
        _container([(json.dumps(str(k)) + ": ", v) for k, v in obj.items()], "{}", out, indent, level)
    elif isinstance(obj, (list, tuple)):
        _container([("", v) for v in obj], "[]", out, indent, level)
    else:
        raise ValidationError(f"cannot serialize object of type {type(obj).__name__}")


def _container(items, brackets: str, out: list[str], indent, level) -> None:
    if not items:
        out.append(brackets)
        return
    flat = indent is None or all(not isinstance(v, (dict, list, tuple, np.ndarray)) for _, v in items)
    sep = ", " if flat else ",\n" + " " * (indent * (level + 1))
    out.append(brackets[0] + ("" if flat else "\n" + " " * (indent * (level + 1))))
    for i, (prefix, v) in enumerate(items):
        if i:
            out.append(sep)
        out.append(prefix)
        _emit(v, out, indent, level + 1)
    out.append(("" if flat else "\n" + " " * (indent * level)) + brackets[1])


def dumps(obj: Any, indent: int | None = 2) -> str:
    """JSON text with every float at 17 significant digits."""
    out: list[str] = []
    _emit(obj, out, indent, 0)
    return "".join(out)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from exc


def read_text(path: str | os.PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputOutputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def load_json(path: str | os.PathLike) -> Any:
    return loads(read_text(path))


def write_atomic(path: str | os.PathLike, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise InputOutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def save_json(path: str | os.PathLike, obj: Any) -> Path:
    return write_atomic(path, dumps(obj) + "\n")


# ---------------------------------------------------------------------------
# Domain objects
# ---------------------------------------------------------------------------


def measure_to_dict(mu: FiniteSignedMeasure) -> dict:
    return {"atoms": [{"x": x, "w": float(w)} for x, w in zip(mu.locations, mu.weights)]}


def measure_from_dict(d: dict) -> FiniteSignedMeasure:
    if not isinstance(d, dict) or "atoms" not in d:
        raise ValidationError('measure JSON needs an "atoms" list')
    _reject_unknown(d, {"atoms", "type"}, "measure")
    try:
        atoms = [(a["x"], a["w"]) for a in d["atoms"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError('every atom needs "x" and "w"') from exc
    if not atoms:
        raise ValidationError("measure has no atoms")
    locs = [tuple(x) if isinstance(x, list) else x for x, _ in atoms]
    return FiniteSignedMeasure(locs, [float(w) for _, w in atoms])


def prefix_to_dict(s: SignedPrefix) -> dict:
    return {"domain": list(s.domain), "points": s.points.tolist(), "signs": s.signs.tolist()}


def prefix_from_dict(d: dict) -> SignedPrefix:
    return SignedPrefix(np.asarray(d["points"], dtype=float), np.asarray(d["signs"]), tuple(d["domain"]))


def atom_sequence_from_dict(d: dict) -> AtomSequence:
    _reject_unknown(d, {"atoms", "indices"}, "atom sequence")
    mu = measure_from_dict({"atoms": d["atoms"]})
    return AtomSequence(mu, np.asarray(d["indices"], dtype=np.int64))


_TYPES: dict[str, tuple[type, Any, Any]] = {
    "FiniteSignedMeasure": (FiniteSignedMeasure, measure_to_dict, measure_from_dict),
    "PLJFunction": (PLJFunction, PLJFunction.to_dict, PLJFunction.from_dict),
    "SignDensity": (SignDensity, SignDensity.to_dict, SignDensity.from_dict),
    "BlockPlan": (BlockPlan, BlockPlan.to_dict, BlockPlan.from_dict),
    "ConvexTarget": (ConvexTarget, ConvexTarget.to_dict, ConvexTarget.from_dict),
    "ArrangementSchedule": (ArrangementSchedule, ArrangementSchedule.to_dict, ArrangementSchedule.from_dict),
    "SignedPrefix": (SignedPrefix, prefix_to_dict, prefix_from_dict),
    "AtomSequence": (AtomSequence, AtomSequence.to_dict, atom_sequence_from_dict),
}


def _reject_unknown(d: dict, allowed: set, what: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ValidationError(f"unknown {what} fields: {sorted(unknown)}")


def to_document(obj: Any) -> dict:
    """Tagged JSON-ready dict for any serializable domain object."""
    for name, (cls, enc, _) in _TYPES.items():
        if isinstance(obj, cls):
            return {"type": name, **enc(obj)}
    raise ValidationError(f"no serializer for {type(obj).__name__}")


def from_document(d: dict, kind: str | None = None) -> Any:
    """Inverse of :func:`to_document`; ``kind`` is needed for untagged documents."""
    if not isinstance(d, dict):
        raise ValidationError("expected a JSON object")
    kind = d.get("type", kind)
    if kind not in _TYPES:
        raise ValidationError(f"unknown or missing document type {kind!r}")
    body = {k: v for k, v in d.items() if k != "type"}
    try:
        return _TYPES[kind][2](body)
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed {kind} document: {exc!r}") from exc


def load_document(path, kind: str | None = None) -> Any:
    return from_document(load_json(path), kind)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def _cell(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (tuple, list)):
        return json.dumps(list(v))
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    return write_atomic(path, csv_text(header, rows))


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    reader = csv.reader(_io.StringIO(read_text(path)))
    try:
        header = next(reader)
    except StopIteration as exc:
        raise ValidationError(f"{path}: empty CSV") from exc
    return header, [row for row in reader if row]


def sequence_csv(prefix: SignedPrefix) -> str:
    return csv_text(["step", "x", "eps"], zip(range(1, len(prefix) + 1), prefix.points, prefix.signs))


def read_signed_sequence(path, domain=(0.0, 1.0)) -> SignedPrefix:
    """Read a ``step,x,eps`` CSV (``eps`` optional, default ``+1``)."""
    header, rows = read_csv(path)
    if "x" not in header:
        raise ValidationError(f"{path}: sequence CSV needs an 'x' column")
    ix = header.index("x")
    ie = header.index("eps") if "eps" in header else None
    try:
        x = np.array([float(r[ix]) for r in rows])
        e = np.array([int(r[ie]) for r in rows] if ie is not None else np.ones(len(rows)), dtype=np.int8)
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"{path}: malformed sequence row ({exc})") from exc
    if x.size == 0:
        raise ValidationError(f"{path}: sequence is empty")
    return SignedPrefix(x, e, domain)


def read_source_column(path) -> list[str]:
    """Values of a source CSV for merging: the ``x`` column, else ``atom_label``, else the last column."""
    header, rows = read_csv(path)
    for name in ("x", "atom_label"):
        if name in header:
            i = header.index(name)
            break
    else:
        i = len(header) - 1
    try:
        return [r[i] for r in rows]
    except IndexError as exc:
        raise ValidationError(f"{path}: ragged CSV row") from exc
