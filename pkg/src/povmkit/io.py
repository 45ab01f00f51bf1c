"""JSON encodings of matrices, POVMs, sharp versions and kernels."""

from __future__ import annotations

import numpy as np

from .continuity import ConvolutionKernel
from .errors import ValidationError
from .intervals import RealGrid
from .kernel import KernelTable
from .povm import DiscretePOVM, OutcomeSpace
from .sharp import SharpVersion


class SchemaError(ValidationError):
    """JSON document does not match the expected schema."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _get(doc, key, path):
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected an object")
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing field")
    return doc[key]


def _real_matrix(rows, d, path):
    try:
        A = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(path, "expected a list of numeric rows") from None
    if A.shape != (d, d):
        raise SchemaError(path, f"expected shape ({d}, {d}), got {A.shape}")
    return A


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"dim": M.shape[0], "re": M.real.tolist(), "im": M.imag.tolist()}


def matrix_from_json(doc, path="$") -> np.ndarray:
    d = _get(doc, "dim", path)
    if not isinstance(d, int) or d < 1:
        raise SchemaError(f"{path}.dim", "expected a positive integer")
    re = _real_matrix(_get(doc, "re", path), d, f"{path}.re")
    im = _real_matrix(doc.get("im", np.zeros((d, d)).tolist()), d, f"{path}.im")
    return re + 1j * im


def _labels(raw, path):
    if not isinstance(raw, list):
        raise SchemaError(path, "expected a list")
    for i, x in enumerate(raw):
        if not isinstance(x, (str, int, float)) or isinstance(x, bool):
            raise SchemaError(f"{path}[{i}]", "labels must be strings or numbers")
    return tuple(raw)


def _unwrap(doc, key):
    """Accept a bare document, or a CLI report carrying it under ``results.<key>``."""
    if isinstance(doc, dict) and "schema" in doc and isinstance(doc.get("results"), dict):
        doc = doc["results"]
    if isinstance(doc, dict) and key in doc:
        return doc[key]
    return doc


def povm_to_json(P: DiscretePOVM) -> dict:
    doc = {"labels": list(P.labels), "dim": P.dim, "effects": [matrix_to_json(F) for F in P.effects]}
    if P.space.positions is not None:
        doc["positions"] = list(P.space.positions)
    return doc


def povm_from_json(doc, path="$") -> DiscretePOVM:
    doc = _unwrap(doc, "povm")
    labels = _labels(_get(doc, "labels", path), f"{path}.labels")
    effects_raw = _get(doc, "effects", path)
    if not isinstance(effects_raw, list):
        raise SchemaError(f"{path}.effects", "expected a list")
    effects = [matrix_from_json(m, f"{path}.effects[{i}]") for i, m in enumerate(effects_raw)]
    if not effects:
        raise SchemaError(f"{path}.effects", "at least one effect is required")
    d = doc.get("dim", effects[0].shape[0])
    if any(F.shape != (d, d) for F in effects):
        raise SchemaError(f"{path}.effects", f"every effect must be {d}x{d}")
    space = OutcomeSpace(labels, doc.get("positions"))
    return DiscretePOVM(space, np.array(effects))


def sharp_to_json(S: SharpVersion) -> dict:
    return {
        "eigenvalues": S.eigenvalues.tolist(),
        "projectors": [matrix_to_json(E) for E in S.projectors],
        "labeling": S.labeling,
        "fallback_used": S.fallback_used,
    }


def sharp_from_json(doc, path="$") -> SharpVersion:
    doc = _unwrap(doc, "sharp_version")
    ev = _get(doc, "eigenvalues", path)
    projs = [matrix_from_json(m, f"{path}.projectors[{i}]") for i, m in enumerate(_get(doc, "projectors", path))]
    if not projs:
        raise SchemaError(f"{path}.projectors", "at least one projector is required")
    return SharpVersion(np.array(ev, dtype=float), tuple(projs),
                        doc.get("labeling", "index"), bool(doc.get("fallback_used", False)))


def kernel_table_to_json(T: KernelTable) -> dict:
    return {"sharp_values": T.sharp_values.tolist(), "labels": list(T.labels), "entries": T.entries.tolist()}


def kernel_table_from_json(doc, path="$") -> KernelTable:
    doc = _unwrap(doc, "kernel")
    sv = _get(doc, "sharp_values", path)
    labels = _labels(_get(doc, "labels", path), f"{path}.labels")
    try:
        entries = np.array(_get(doc, "entries", path), dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{path}.entries", "expected a numeric matrix") from None
    return KernelTable(np.array(sv, dtype=float), labels, entries)


def convolution_kernel_from_json(doc, path="$") -> ConvolutionKernel:
    g = _get(doc, "grid", path)
    try:
        grid = RealGrid(float(_get(g, "start", f"{path}.grid")), float(_get(g, "step", f"{path}.grid")),
                        int(_get(g, "n", f"{path}.grid")))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{path}.grid", str(exc)) from None
    try:
        density = np.array(_get(doc, "density", path), dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{path}.density", "expected a list of numbers") from None
    sup = doc.get("sup_bound")
    return ConvolutionKernel(grid, density,
                             None if sup is None else float(sup), bool(doc.get("smooth", True)))


def convolution_kernel_to_json(K: ConvolutionKernel) -> dict:
    return K.to_dict()
