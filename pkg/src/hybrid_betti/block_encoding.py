"""Explicit unitary dilations and block-encoding arithmetic.

A :class:`BlockEncodingMatrix` is a dense unitary ``U`` acting on
``ancilla (x) system``, with basis index ``a * dim + s``.  The flagged block
is ancilla index 0, so the encoded operator is ``U[:dim, :dim]``.

These are desk-scale linear-algebra checks of block-encoding contracts; no
circuits are synthesised and dimensions need not be powers of two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chain import BoundaryMatrix, gram_operator

TOL = 1e-10


class BlockEncodingError(ValueError):
    pass


@dataclass(frozen=True)
class BlockEncodingMatrix:
    dim: int
    ancilla_dim: int
    unitary: np.ndarray = field(repr=False)
    encoded: np.ndarray = field(repr=False)
    subnormalization: float = 1.0
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def block(self) -> np.ndarray:
        return self.unitary[: self.dim, : self.dim]

    def unitarity_defect(self) -> float:
        u = self.unitary
        if u.size == 0:
            return 0.0
        return float(np.linalg.norm(u.conj().T @ u - np.eye(len(u)), 2))

    def block_defect(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.linalg.norm(self.block - self.encoded, 2))


def dilate(a, *, tol: float = 1e-12) -> BlockEncodingMatrix:
    """Unitary dilation ``[[A, sqrt(I - A A^+)], [sqrt(I - A^+ A), -A^+]]`` of a contraction.

    Both square roots come from one SVD ``A = U S V^+``, which keeps the
    result unitary to machine precision even when singular values sit at 1.
    """
    a = np.atleast_2d(np.asarray(a))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise BlockEncodingError(f"expected a square matrix, got shape {a.shape}")
    d = a.shape[0]
    if d == 0:
        return BlockEncodingMatrix(0, 2, np.zeros((0, 0)), a.copy())
    u, s, vh = np.linalg.svd(a)
    if s[0] > 1 + tol:
        raise BlockEncodingError(f"operator norm {s[0]:.6g} exceeds 1")
    s = np.minimum(s, 1.0)
    c = np.sqrt(1.0 - s**2)
    v = vh.conj().T
    top_right = (u * c) @ u.conj().T
    bottom_left = (v * c) @ vh
    ah = a.conj().T
    unitary = np.block([[a, top_right], [bottom_left, -ah]])
    return BlockEncodingMatrix(d, 2, unitary, a.copy())


def identity_encoding(d: int) -> BlockEncodingMatrix:
    """``sigma_z (x) I``: the trivial encoding of the identity."""
    u = np.kron(np.diag([1.0, -1.0]), np.eye(d))
    return BlockEncodingMatrix(d, 2, u, np.eye(d))


def verify_action(be: BlockEncodingMatrix, phi) -> tuple[float, float]:
    """Apply ``U`` to ``|0>|phi>`` and compare with ``|0> A|phi>``.

    Returns ``(residual, orthogonality_defect)``: the norm of the flagged
    output minus ``A phi``, and the overlap between ``|0> A phi`` and the
    garbage part of the output.
    """
    phi = np.asarray(phi, dtype=complex).ravel()
    if phi.shape[0] != be.dim:
        raise BlockEncodingError(f"state has dimension {phi.shape[0]}, encoding acts on {be.dim}")
    if abs(np.linalg.norm(phi) - 1) > 1e-9:
        raise BlockEncodingError("state must be normalised")
    full = np.zeros(be.ancilla_dim * be.dim, dtype=complex)
    full[: be.dim] = phi
    out = be.unitary @ full
    target = be.encoded @ phi
    residual = float(np.linalg.norm(out[: be.dim] - target))
    flagged = np.zeros_like(out)
    flagged[: be.dim] = target
    garbage = out - flagged
    return residual, float(abs(np.vdot(flagged, garbage)))


def _embed(u: np.ndarray, anc: int, dim: int, extra: int, first: bool) -> np.ndarray:
    """Extend ``u`` on (anc, sys) to act on (anc, extra, sys) or (extra, anc, sys) as identity on ``extra``."""
    t = u.reshape(anc, dim, anc, dim)
    e = np.eye(extra)
    if first:
        # (anc, extra, sys)
        big = np.einsum("asbt,xy->axsbyt", t, e)
        return big.reshape(anc * extra * dim, anc * extra * dim)
    big = np.einsum("asbt,xy->xasybt", t, e)
    return big.reshape(extra * anc * dim, extra * anc * dim)


def compose_product(a: BlockEncodingMatrix, b: BlockEncodingMatrix) -> BlockEncodingMatrix:
    """Encoding of ``A B`` on the joint ancilla ``(anc_a, anc_b)``."""
    if a.dim != b.dim:
        raise BlockEncodingError(f"dimension mismatch {a.dim} vs {b.dim}")
    ua = _embed(a.unitary, a.ancilla_dim, a.dim, b.ancilla_dim, first=True)
    ub = _embed(b.unitary, b.ancilla_dim, b.dim, a.ancilla_dim, first=False)
    return BlockEncodingMatrix(
        a.dim,
        a.ancilla_dim * b.ancilla_dim,
        ua @ ub,
        a.encoded @ b.encoded,
        a.subnormalization * b.subnormalization,
    )


def compose_tensor(encodings: Sequence[BlockEncodingMatrix]) -> BlockEncodingMatrix:
    """Encoding of ``A_1 (x) ... (x) A_m`` with all ancillas moved to the front."""
    if not encodings:
        raise BlockEncodingError("need at least one encoding")
    m = len(encodings)
    u = encodings[0].unitary
    for e in encodings[1:]:
        u = np.kron(u, e.unitary)
    # kron gives (a1, s1, a2, s2, ...); permute to (a1..am, s1..sm)
    shape = []
    for e in encodings:
        shape += [e.ancilla_dim, e.dim]
    t = u.reshape(shape + shape)
    out_axes = [2 * i for i in range(m)] + [2 * i + 1 for i in range(m)]
    perm = out_axes + [2 * m + ax for ax in out_axes]
    anc = math.prod(e.ancilla_dim for e in encodings)
    dim = math.prod(e.dim for e in encodings)
    u = t.transpose(perm).reshape(anc * dim, anc * dim)
    enc = encodings[0].encoded
    for e in encodings[1:]:
        enc = np.kron(enc, e.encoded)
    return BlockEncodingMatrix(dim, anc, u, enc, math.prod(e.subnormalization for e in encodings))


def _prep_unitary(m: int) -> np.ndarray:
    """Real orthogonal matrix whose first column is the uniform vector (Householder reflection)."""
    uniform = np.full(m, 1 / math.sqrt(m))
    v = uniform.copy()
    v[0] -= 1.0
    nv = np.dot(v, v)
    if nv < 1e-30:
        return np.eye(m)
    return np.eye(m) - 2 * np.outer(v, v) / nv


def _pad_ancilla(be: BlockEncodingMatrix, anc: int) -> np.ndarray:
    if anc == be.ancilla_dim:
        return be.unitary
    if anc % be.ancilla_dim:
        # pad with a direct sum of identity so the flagged block is untouched
        total = anc * be.dim
        u = np.eye(total, dtype=be.unitary.dtype)
        k = be.unitary.shape[0]
        u[:k, :k] = be.unitary
        return u
    return _embed(be.unitary, be.ancilla_dim, be.dim, anc // be.ancilla_dim, first=False)


def compose_lcu(encodings: Sequence[BlockEncodingMatrix], signs: Sequence[int]) -> BlockEncodingMatrix:
    """Encoding of ``sum_i s_i A_i / m`` via PREP^T . SELECT . PREP."""
    m = len(encodings)
    if m == 0 or len(signs) != m:
        raise BlockEncodingError("need one sign per encoding")
    if any(s not in (1, -1) for s in signs):
        raise BlockEncodingError("signs must be +1 or -1")
    dim = encodings[0].dim
    if any(e.dim != dim for e in encodings):
        raise BlockEncodingError("all encodings must act on the same dimension")
    anc = max(e.ancilla_dim for e in encodings)
    block = anc * dim
    select = np.zeros((m * block, m * block), dtype=np.result_type(*[e.unitary for e in encodings]))
    for i, (e, s) in enumerate(zip(encodings, signs)):
        select[i * block : (i + 1) * block, i * block : (i + 1) * block] = s * _pad_ancilla(e, anc)
    prep = np.kron(_prep_unitary(m), np.eye(block))
    u = prep.T @ select @ prep
    enc = sum(s * e.encoded for e, s in zip(encodings, signs)) / m
    return BlockEncodingMatrix(dim, m * anc, u, enc, float(m))


def scale(be: BlockEncodingMatrix, p: float) -> BlockEncodingMatrix:
    """Encoding of ``A / p`` for ``p > 1``: tensor with a one-dimensional encoding of ``1/p``."""
    if not p > 1:
        raise BlockEncodingError(f"scale factor must exceed 1, got {p}")
    out = compose_tensor([dilate(np.array([[1.0 / p]])), be])
    return BlockEncodingMatrix(out.dim, out.ancilla_dim, out.unitary, out.encoded, be.subnormalization * p)


def encode_gram(m: BoundaryMatrix) -> BlockEncodingMatrix:
    """Encoding of ``M_r^T M_r / ((r+1)|S_r|)`` realised as a dilation of the normalised Gram matrix.

    Resource counts of a circuit implementation are recorded as metadata
    only; they are not verified here.
    """
    op = gram_operator(m)
    size = len(m.simplices)
    if size == 0:
        return BlockEncodingMatrix(0, 2, np.zeros((0, 0)), np.zeros((0, 0)), 1.0)
    fro = m.frobenius_norm_sq()
    # the identity holds for r >= 1; the r = 0 boundary is the zero map
    if m.r >= 1 and fro != (m.r + 1) * size:
        raise BlockEncodingError(f"Frobenius norm^2 {fro} != (r+1)|S_r| = {(m.r + 1) * size}")
    be = dilate(op.normalized)
    meta = {
        "r": m.r,
        "n": m.n,
        "simplices": size,
        "sparsity": m.r + 1,
        "ancilla_qubits_order": size * max(m.r, 1),
        "depth_order": math.log2(max(m.r, 1) * max(m.n, 2)),
    }
    return BlockEncodingMatrix(be.dim, be.ancilla_dim, be.unitary, be.encoded, float(op.normalization), meta)
