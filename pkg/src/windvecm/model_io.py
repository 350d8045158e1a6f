"""Structured-text model files.

Layout (one header line, then named sections)::

    windvecm-model 1
    kind vecm            # or: var
    det constant
    d 3
    p 2
    r 1                  # vecm only
    matrix alpha 3 1
    <row of numbers per line, space separated, 17 significant digits>
    ...
    vector eigenvalues 3
    <numbers>

Numbers are rendered with %.17g, which round-trips IEEE doubles exactly, so
``read_model(write_model(m))`` reproduces every coefficient bit-for-bit.
A VAR file carries matrices ``phi1..phip``, ``psi``, ``resid_cov``; a VECM
file carries ``alpha``, ``beta``, ``gamma1..gamma{p-1}``, ``psi``,
``resid_cov`` and optionally the eigenvalue vector.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ParseError
from .panel import DeterministicSpec
from .var import VarModel
from .vecm import VecmModel

_MAGIC = "windvecm-model 1"


def _format_matrix(name: str, mat: np.ndarray) -> list[str]:
    rows, cols = mat.shape
    lines = [f"matrix {name} {rows} {cols}"]
    for i in range(rows):
        lines.append(" ".join(f"{v:.17g}" for v in mat[i]))
    return lines


def write_model(model: VarModel | VecmModel, path) -> None:
    lines = [_MAGIC]
    if isinstance(model, VecmModel):
        lines += [
            "kind vecm",
            f"det {model.det.value}",
            f"d {model.d}",
            f"p {model.p}",
            f"r {model.r}",
        ]
        lines += _format_matrix("alpha", model.alpha)
        lines += _format_matrix("beta", model.beta)
        for k, g in enumerate(model.gamma, start=1):
            lines += _format_matrix(f"gamma{k}", g)
        lines += _format_matrix("psi", model.psi)
        lines += _format_matrix("resid_cov", model.resid_cov)
        if model.eigenvalues is not None:
            lines.append(f"vector eigenvalues {model.eigenvalues.size}")
            lines.append(" ".join(f"{v:.17g}" for v in model.eigenvalues))
    elif isinstance(model, VarModel):
        lines += [
            "kind var",
            f"det {model.det.value}",
            f"d {model.d}",
            f"p {model.p}",
        ]
        for k, m in enumerate(model.phi, start=1):
            lines += _format_matrix(f"phi{k}", m)
        lines += _format_matrix("psi", model.psi)
        lines += _format_matrix("resid_cov", model.resid_cov)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


class _Reader:
    def __init__(self, path):
        self.lines = Path(path).read_text(encoding="utf-8").splitlines()
        self.pos = 0

    def next_line(self) -> str:
        if self.pos >= len(self.lines):
            raise ParseError("unexpected end of model file", line=self.pos + 1)
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def scalar(self, key: str) -> str:
        line = self.next_line()
        parts = line.split()
        if len(parts) != 2 or parts[0] != key:
            raise ParseError(f"expected '{key} <value>', got {line!r}", line=self.pos)
        return parts[1]

    def matrix(self, name: str) -> np.ndarray:
        line = self.next_line()
        parts = line.split()
        if len(parts) != 4 or parts[:2] != ["matrix", name]:
            raise ParseError(f"expected matrix {name}, got {line!r}", line=self.pos)
        rows, cols = int(parts[2]), int(parts[3])
        out = np.zeros((rows, cols))
        for i in range(rows):
            tokens = self.next_line().split()
            if len(tokens) != cols:
                raise ParseError(
                    f"matrix {name} row {i} has {len(tokens)} values, "
                    f"expected {cols}",
                    line=self.pos,
                )
            out[i] = [float(t) for t in tokens]
        return out


def read_model(path) -> VarModel | VecmModel:
    reader = _Reader(path)
    if reader.next_line().strip() != _MAGIC:
        raise ParseError("not a windvecm model file", line=1)
    kind = reader.scalar("kind")
    det = DeterministicSpec(reader.scalar("det"))
    d = int(reader.scalar("d"))
    p = int(reader.scalar("p"))
    if kind == "vecm":
        r = int(reader.scalar("r"))
        alpha = reader.matrix("alpha")
        beta = reader.matrix("beta")
        gamma = tuple(reader.matrix(f"gamma{k}") for k in range(1, p))
        psi = reader.matrix("psi")
        resid_cov = reader.matrix("resid_cov")
        eigenvalues = None
        if reader.pos < len(reader.lines) and reader.lines[reader.pos].startswith(
            "vector eigenvalues"
        ):
            header = reader.next_line().split()
            count = int(header[2])
            tokens = reader.next_line().split()
            if len(tokens) != count:
                raise ParseError("eigenvalue count mismatch", line=reader.pos)
            eigenvalues = np.array([float(t) for t in tokens])
        if alpha.shape != (d, r) or beta.shape != (d, r):
            raise ParseError("alpha/beta shape disagrees with header")
        return VecmModel(
            alpha=alpha, beta=beta, gamma=gamma, psi=psi, det=det,
            eigenvalues=eigenvalues, r=r, p=p, resid_cov=resid_cov,
        )
    if kind == "var":
        phi = tuple(reader.matrix(f"phi{k}") for k in range(1, p + 1))
        psi = reader.matrix("psi")
        resid_cov = reader.matrix("resid_cov")
        if phi[0].shape != (d, d):
            raise ParseError("phi shape disagrees with header")
        return VarModel(phi=phi, psi=psi, det=det, resid_cov=resid_cov)
    raise ParseError(f"unknown model kind {kind!r}")
