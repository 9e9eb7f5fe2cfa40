"""Matrix realizations of the split classical groups SL(n,R) and Sp(n,R).

Conventions fixed here and relied on everywhere else:

* The diagonal weights of the defining representation are sorted so that they
  decrease along the diagonal on the chamber of descending coordinates.  The
  unipotent factor of the Iwasawa decomposition is then strictly LOWER
  triangular, and the squared abelian factor of ``z = n a k`` can be read off
  the leading principal minors of ``z z^T``.
* Sp(n,R) is first built in the standard block frame with symplectic form
  ``J = [[0, I], [-I, 0]]`` and then conjugated by a fixed permutation into the
  weight-sorted frame.  All public matrices live in the sorted frame; the
  permutation is recorded on the context.
* Cartan coordinates are plain numpy arrays of length n: the leading diagonal
  entries of the corresponding matrix.  For the special linear family they sum
  to zero; for the symplectic family the trailing diagonal is the negated
  reversal of the leading one.
* The invariant form is ``kappa(X, Y) = c * tr(XY)`` on the defining
  representation with c = 2n for sl(n) and c = 2n + 2 for sp(2n); the scale is
  recorded so that functional values are reproducible.
"""

from __future__ import annotations

import dataclasses
from enum import Enum

import numpy as np
import scipy.linalg

from .errors import SingularInput, UnsupportedFamily

GROUP_TOL = 1e-10


class Family(str, Enum):
    SPECIAL_LINEAR = "sl"
    SYMPLECTIC = "sp"


@dataclasses.dataclass(frozen=True)
class GroupSpec:
    """Family tag plus the rank parameter n (matrix size for sl, block size for sp)."""

    family: Family
    n: int

    def __post_init__(self):
        if not isinstance(self.family, Family):
            try:
                object.__setattr__(self, "family", Family(self.family))
            except ValueError:
                raise UnsupportedFamily(f"unknown family {self.family!r}") from None
        if self.family is Family.SPECIAL_LINEAR and self.n < 2:
            raise ValueError("special-linear requires n >= 2")
        if self.family is Family.SYMPLECTIC and self.n < 1:
            raise ValueError("symplectic requires n >= 1")

    @property
    def label(self) -> str:
        return f"{self.family.value}:{self.n}"


@dataclasses.dataclass(frozen=True)
class RootDatum:
    """Restricted root system data in Cartan coordinates.

    ``positive`` holds the roots whose root spaces are strictly lower
    triangular in the sorted frame; on the chamber of descending coordinates
    these take negative values, which is exactly what makes the unipotent
    factor lower triangular.  ``m_dim`` is the dimension of the centralizer of
    the Cartan subspace inside the maximal compact subalgebra (zero for both
    split families).
    """

    rank: int
    roots: np.ndarray            # (count, n) covectors
    positive_roots: np.ndarray   # (count/2, n)
    simple_roots: np.ndarray     # (rank, n)
    multiplicities: tuple[int, ...]
    weyl_generators: np.ndarray  # (rank, n, n) orthogonal reflections
    m_dim: int = 0

    def evaluate(self, x):
        """Values alpha(x) for every root, shape (count,) or (..., count)."""
        return np.asarray(x) @ self.roots.T


@dataclasses.dataclass(frozen=True)
class CovectorIA:
    """Functional on the complexified Cartan subspace vanishing on its real part.

    Determined by m_coords, the coordinates of M with H = i*M; the pairing is
    lam(Z) = kappa_R(Z, i*M), which kills the real part of Z and is real on
    the imaginary part.
    """

    m_coords: np.ndarray
    regular: bool = False

    def __post_init__(self):
        object.__setattr__(self, "m_coords", np.asarray(self.m_coords, dtype=float))


@dataclasses.dataclass(frozen=True)
class GroupContext:
    """Immutable bundle of one concrete group realization.

    Safe to share across workers; every operation in the package is a pure
    function of a context and its other arguments.
    """

    spec: GroupSpec
    ambient_size: int
    basis_a: np.ndarray          # (dim_a, m, m)
    basis_n: np.ndarray          # (dim_n, m, m)
    basis_k: np.ndarray          # (dim_k, m, m)
    root_datum: RootDatum
    killing_scale: float
    perm: np.ndarray             # sorted-frame index -> standard-frame index
    symplectic_form: np.ndarray | None
    k_gram_chol: tuple           # cho_factor of the Gram matrix of basis_k

    def theta(self, g):
        """Cartan involution (g^T)^{-1}, holomorphic on the complexified group."""
        return cartan_involution(self, g)

    @property
    def family(self) -> Family:
        return self.spec.family

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def dim_g(self) -> int:
        if self.family is Family.SPECIAL_LINEAR:
            return self.n * self.n - 1
        return self.n * (2 * self.n + 1)

    @property
    def coord_weight(self) -> float:
        """kappa(diag(x), diag(y)) = coord_weight * (x . y) on Cartan coordinates."""
        if self.family is Family.SPECIAL_LINEAR:
            return self.killing_scale
        return 2.0 * self.killing_scale

    def full_diag(self, x):
        """Ambient diagonal of the Cartan element with coordinates x."""
        x = np.asarray(x)
        if self.family is Family.SPECIAL_LINEAR:
            return x
        return np.concatenate([x, -x[..., ::-1]], axis=-1)

    def a_matrix(self, x):
        """Cartan coordinates -> diagonal matrix in the sorted frame."""
        d = self.full_diag(x)
        out = np.zeros((self.ambient_size, self.ambient_size), dtype=d.dtype)
        np.fill_diagonal(out, d)
        return out

    def a_coords(self, mat_or_diag):
        """Leading Cartan coordinates of a diagonal (matrix or vector)."""
        d = np.asarray(mat_or_diag)
        if d.ndim == 2:
            d = np.diagonal(d)
        if self.family is Family.SPECIAL_LINEAR:
            return d.copy()
        head = d[..., : self.n]
        tail = d[..., self.n:]
        return 0.5 * (head - tail[..., ::-1])

    def a_exp(self, x):
        """exp of the Cartan element with (possibly complex) coordinates x."""
        d = np.exp(self.full_diag(x))
        out = np.zeros((self.ambient_size, self.ambient_size), dtype=d.dtype)
        np.fill_diagonal(out, d)
        return out

    def to_standard_frame(self, m):
        """Undo the weight-sorting permutation (identity for sl)."""
        if self.family is Family.SPECIAL_LINEAR:
            return np.asarray(m)
        inv = np.argsort(self.perm)
        return np.asarray(m)[..., inv, :][..., :, inv]

    def to_sorted_frame(self, m):
        if self.family is Family.SPECIAL_LINEAR:
            return np.asarray(m)
        p = self.perm
        return np.asarray(m)[..., p, :][..., :, p]

    def group_residual(self, g) -> float:
        """Scaled deviation of g from the group (0 for exact members)."""
        g = np.asarray(g)
        scale = 1.0 + np.linalg.norm(g) ** 2
        if self.family is Family.SPECIAL_LINEAR:
            return abs(np.linalg.det(g) - 1.0) / scale
        j = self.symplectic_form
        return np.linalg.norm(g.T @ j @ g - j) / scale

    def in_group(self, g, tol: float = GROUP_TOL) -> bool:
        return self.group_residual(g) <= tol


def _freeze(a):
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def _sl_bases(n):
    basis_a = []
    for i in range(n - 1):
        h = np.zeros((n, n))
        h[i, i] = 1.0
        h[i + 1, i + 1] = -1.0
        basis_a.append(h)
    basis_n, basis_k = [], []
    for i in range(n):
        for j in range(i):
            e = np.zeros((n, n))
            e[i, j] = 1.0
            basis_n.append(e)
            basis_k.append(e - e.T)
    return map(np.array, (basis_a, basis_n, basis_k))


def _sl_root_datum(n):
    roots, positive, mults = [], [], []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            a = np.zeros(n)
            a[i], a[j] = 1.0, -1.0
            roots.append(a)
            mults.append(1)
            if i > j:
                positive.append(a)
    simple = [r for r in positive if np.count_nonzero(r) == 2
              and np.flatnonzero(r)[1] - np.flatnonzero(r)[0] == 1]
    gens = []
    for i in range(n - 1):
        s = np.eye(n)
        s[[i, i + 1]] = s[[i + 1, i]]
        gens.append(s)
    return RootDatum(
        rank=n - 1,
        roots=_freeze(roots),
        positive_roots=_freeze(positive),
        simple_roots=_freeze(simple),
        multiplicities=tuple(mults),
        weyl_generators=_freeze(gens),
    )


def _sp_embed_alg(a_part, b_part):
    """u(n)-style block embedding [[A, B], [-B, A]] (standard frame)."""
    n = a_part.shape[0]
    out = np.zeros((2 * n, 2 * n))
    out[:n, :n] = a_part
    out[:n, n:] = b_part
    out[n:, :n] = -b_part
    out[n:, n:] = a_part
    return out


def _sp_bases(n):
    ee = lambda i, j: np.eye(1, n * n, i * n + j).reshape(n, n)
    basis_a = []
    for p in range(n):
        h = np.zeros((2 * n, 2 * n))
        h[p, p] = 1.0
        h[n + p, n + p] = -1.0
        basis_a.append(h)
    basis_n = []
    for p in range(n):
        for q in range(p):
            x = np.zeros((2 * n, 2 * n))
            x[:n, :n] = ee(p, q)
            x[n:, n:] = -ee(q, p)
            basis_n.append(x)
    for p in range(n):
        for q in range(p, n):
            x = np.zeros((2 * n, 2 * n))
            c = ee(p, q) + ee(q, p) if q != p else ee(p, p)
            x[n:, :n] = c
            basis_n.append(x)
    basis_k = []
    for p in range(n):
        for q in range(p + 1, n):
            basis_k.append(_sp_embed_alg(ee(p, q) - ee(q, p), np.zeros((n, n))))
    for p in range(n):
        for q in range(p, n):
            b = ee(p, q) + ee(q, p) if q != p else ee(p, p)
            basis_k.append(_sp_embed_alg(np.zeros((n, n)), b))
    return map(np.array, (basis_a, basis_n, basis_k))


def _sp_root_datum(n):
    roots, positive, mults = [], [], []

    def add(cov, pos):
        roots.append(cov)
        mults.append(1)
        if pos:
            positive.append(cov)

    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            a = np.zeros(n)
            a[p], a[q] = 1.0, -1.0
            add(a, p > q)
    for p in range(n):
        for q in range(p, n):
            a = np.zeros(n)
            a[p] += 1.0
            a[q] += 1.0
            add(a.copy(), False)
            add(-a, True)
    gens = []
    for i in range(n - 1):
        s = np.eye(n)
        s[[i, i + 1]] = s[[i + 1, i]]
        gens.append(s)
    flip = np.eye(n)
    flip[n - 1, n - 1] = -1.0
    gens.append(flip)
    simple = []
    for i in range(n - 1):
        a = np.zeros(n)
        a[i + 1], a[i] = 1.0, -1.0
        simple.append(a)
    last = np.zeros(n)
    last[n - 1] = -2.0
    simple.append(last)
    return RootDatum(
        rank=n,
        roots=_freeze(roots),
        positive_roots=_freeze(positive),
        simple_roots=_freeze(simple),
        multiplicities=tuple(mults),
        weyl_generators=_freeze(gens),
    )


def build_group(spec: GroupSpec) -> GroupContext:
    """Construct the sorted-frame realization for a group spec."""
    if not isinstance(spec, GroupSpec):
        spec = GroupSpec(*spec)
    if spec.family is Family.SPECIAL_LINEAR:
        n = spec.n
        basis_a, basis_n, basis_k = _sl_bases(n)
        datum = _sl_root_datum(n)
        ctx_kwargs = dict(
            ambient_size=n,
            killing_scale=2.0 * n,
            perm=_freeze(np.arange(n)),
            symplectic_form=None,
        )
    elif spec.family is Family.SYMPLECTIC:
        n = spec.n
        basis_a, basis_n, basis_k = _sp_bases(n)
        # sorted frame: diagonal weights (e_1 .. e_n, -e_n .. -e_1)
        perm = np.array(list(range(n)) + list(range(2 * n - 1, n - 1, -1)))
        ix = np.ix_(perm, perm)
        basis_a = basis_a[:, perm, :][:, :, perm]
        basis_n = basis_n[:, perm, :][:, :, perm]
        basis_k = basis_k[:, perm, :][:, :, perm]
        j_std = np.zeros((2 * n, 2 * n))
        j_std[:n, n:] = np.eye(n)
        j_std[n:, :n] = -np.eye(n)
        datum = _sp_root_datum(n)
        ctx_kwargs = dict(
            ambient_size=2 * n,
            killing_scale=2.0 * n + 2.0,
            perm=_freeze(perm),
            symplectic_form=_freeze(j_std[ix]),
        )
    else:
        raise UnsupportedFamily(f"unknown family {spec.family!r}")

    scale = ctx_kwargs["killing_scale"]
    gram = np.einsum("aij,bji->ab", basis_k, basis_k) * (-2.0 * scale)
    chol = scipy.linalg.cho_factor(gram)
    return GroupContext(
        spec=spec,
        basis_a=_freeze(basis_a),
        basis_n=_freeze(basis_n),
        basis_k=_freeze(basis_k),
        root_datum=datum,
        k_gram_chol=(chol[0], chol[1]),
        **ctx_kwargs,
    )


def cartan_involution(ctx: GroupContext, g):
    """theta(g) = (g^T)^{-1}, the holomorphic extension of the Cartan involution."""
    g = np.asarray(g)
    try:
        inv = np.linalg.inv(g.T)
    except np.linalg.LinAlgError:
        raise SingularInput("matrix is singular") from None
    if not np.all(np.isfinite(inv)):
        raise SingularInput("matrix is singular to working precision")
    resid = np.linalg.norm(g.T @ inv - np.eye(ctx.ambient_size))
    if resid > 1e-6 * (1.0 + np.linalg.norm(g)):
        raise SingularInput("matrix inverse failed the residual check")
    return inv


def killing_c(ctx: GroupContext, z, w) -> complex:
    """Complex-bilinear invariant form c * tr(ZW)."""
    return ctx.killing_scale * np.trace(np.asarray(z) @ np.asarray(w))


def killing_r(ctx: GroupContext, z, w) -> float:
    """Invariant form of the underlying real algebra: 2 Re kappa_C(Z, W).

    On split real and imaginary parts this is
    2 * (kappa(Re Z, Re W) - kappa(Im Z, Im W)).
    """
    return 2.0 * killing_c(ctx, z, w).real


def h_lambda(ctx: GroupContext, lam: CovectorIA):
    """Dual element H = i * M of a covector on the complexified Cartan space.

    Satisfies kappa_R(Z, H) = lam(Z) for every Z there: zero on the real part,
    -2 kappa(Im Z, M) on the imaginary part.
    """
    return 1j * ctx.a_matrix(lam.m_coords)


def pair_ia(ctx: GroupContext, z_coords, m_coords):
    """lam(Z) = kappa_R(Z, i M) on Cartan coordinates; real by construction."""
    z = np.asarray(z_coords)
    m = np.asarray(m_coords)
    return -2.0 * ctx.coord_weight * (np.imag(z) @ m)


def is_regular(ctx: GroupContext, coords, floor: float = 1e-12) -> bool:
    """True when every root is bounded away from zero on the given coordinates."""
    vals = ctx.root_datum.evaluate(np.asarray(coords, dtype=float))
    return bool(np.min(np.abs(vals)) > floor)


def project_a(ctx: GroupContext, z):
    """Component of Z in the complexified Cartan subspace, as coordinates.

    In the sorted lower-triangular frame the projection along k_C + n_C is the
    diagonal part: strictly upper entries are absorbed as (u + theta(u)) in k_C
    minus theta(u) in n_C, and the compact subalgebra has zero diagonal.
    """
    return ctx.a_coords(np.diagonal(np.asarray(z)))


def split_nak(ctx: GroupContext, z):
    """Decompose Z into (n, a, k) components by solving in the concatenated basis.

    Slow oracle path used for validation; project_a is the production route.
    """
    m = ctx.ambient_size
    blocks = np.concatenate([ctx.basis_n, ctx.basis_a, ctx.basis_k])
    mat = blocks.reshape(len(blocks), m * m).T
    coeff, *_ = np.linalg.lstsq(mat, np.asarray(z, dtype=complex).ravel(), rcond=None)
    dn, da = len(ctx.basis_n), len(ctx.basis_a)
    zn = np.tensordot(coeff[:dn], ctx.basis_n, axes=1)
    za = np.tensordot(coeff[dn:dn + da], ctx.basis_a, axes=1)
    zk = np.tensordot(coeff[dn + da:], ctx.basis_k, axes=1)
    return zn, za, zk
