#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Mixed complexes, their u-variable total complexes and Connes' SBI maps.

Everything is in cochain convention: b raises degree by one, B lowers it
by one. A chain complex N is regraded as M^k := N_(c - k).

A window [lo, hi] is cut out of a possibly infinite mixed complex by
looking one degree past each open end: the lowest degree becomes the
quotient by the incoming image, the highest degree the kernel of the
outgoing differential. With that, b-homology is exact at every window
degree; only the u-complexes need a trust rule.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from opcalc.exact_linalg import (
    QQ,
    Subspace,
    image_basis,
    induced_map,
    kernel_basis,
    mat,
    rank,
    subquotient,
)
from opcalc.exceptions import NotAComplex, UntrustedDegree
from opcalc.verdicts import ValidationReport

logger = logging.getLogger("opcalc.complexes")

END_CLOSED = "closed"
END_OPEN = "open"
END_SEALED = "sealed"

CYCLIC = "cyclic"
NEGATIVE = "negative"
PERIODIC = "periodic"
VARIANTS = (CYCLIC, NEGATIVE, PERIODIC)


@dataclass
class GradedSpace:
    lo: int
    hi: int
    dims: Dict[int, int]

    def dim(self, k):
        if k < self.lo or k > self.hi:
            return 0
        return self.dims.get(k, 0)

    def degrees(self):
        return range(self.lo, self.hi + 1)


@dataclass
class HomologyEntry:
    degree: int
    dim: int
    subquotient: object
    trusted: bool = True

    def to_dict(self):
        return {"degree": self.degree, "dim": self.dim, "trusted": self.trusted}


@dataclass
class HomologyResult:
    name: str
    variant: str
    entries: Dict[int, HomologyEntry] = field(default_factory=dict)

    def dims(self, trusted_only=False):
        return {
            n: e.dim for n, e in sorted(self.entries.items()) if e.trusted or not trusted_only
        }

    def trusted_degrees(self):
        return [n for n, e in sorted(self.entries.items()) if e.trusted]

    def to_dict(self):
        return {
            "name": self.name,
            "variant": self.variant,
            "degrees": [e.to_dict() for _, e in sorted(self.entries.items())],
        }


def homology(dim, d_in, d_out, degree, field_spec=QQ, trusted=True):
    """ker(d_out) / im(d_in) at a space of dimension ``dim``."""
    d_in = np.asarray(d_in, dtype=object)
    d_out = np.asarray(d_out, dtype=object)
    if d_in.ndim != 2 or d_in.shape[0] != dim or d_out.ndim != 2 or d_out.shape[1] != dim:
        raise NotAComplex(f"differential shapes {d_in.shape}, {d_out.shape} do not meet dimension {dim}",
                          degree=degree)
    if not field_spec.is_zero(mat(d_out, d_in)):
        raise NotAComplex(f"d^2 != 0 at degree {degree}", degree=degree)
    sq = subquotient(kernel_basis(d_out, field_spec), image_basis(d_in, field_spec), field_spec)
    return HomologyEntry(degree, sq.dim, sq, trusted)


@dataclass(eq=False)
class MixedComplex:
    """(M, b, B) on a finite window, with the raw-to-window maps at cut ends."""

    field: object
    space: GradedSpace
    b: Dict[int, np.ndarray]
    B: Dict[int, np.ndarray]
    orientation: str = "cochain"
    ends: Dict[str, str] = field(default_factory=lambda: {"lo": END_CLOSED, "hi": END_CLOSED})
    transports: Dict[int, Tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    raw_dims: Dict[int, int] = field(default_factory=dict)
    name: str = ""
    _homology: Dict[int, HomologyEntry] = field(default_factory=dict, repr=False)

    @property
    def lo(self):
        return self.space.lo

    @property
    def hi(self):
        return self.space.hi

    def dim(self, k):
        return self.space.dim(k)

    def raw_dim(self, k):
        if k < self.lo or k > self.hi:
            return 0
        return self.raw_dims.get(k, self.dim(k))

    def b_at(self, k):
        if k in self.b:
            return self.b[k]
        return np.zeros((self.dim(k + 1), self.dim(k)), dtype=object)

    def B_at(self, k):
        if k in self.B:
            return self.B[k]
        return np.zeros((self.dim(k - 1), self.dim(k)), dtype=object)

    def into(self, k):
        """Raw coordinates at degree k -> window coordinates."""
        if k in self.transports:
            return self.transports[k][0]
        return np.eye(self.dim(k), dtype=object)

    def out_of(self, k):
        """Window coordinates at degree k -> raw representatives."""
        if k in self.transports:
            return self.transports[k][1]
        return np.eye(self.dim(k), dtype=object)

    def transport(self, raw, src, dst):
        """Window matrix of a raw operator M^src -> M^dst."""
        if self.dim(src) == 0 or self.dim(dst) == 0:
            return np.zeros((self.dim(dst), self.dim(src)), dtype=object)
        return self.field.reduce(mat(self.into(dst), mat(raw, self.out_of(src))))

    def is_open(self, side):
        return self.ends[side] == END_OPEN

    def known_zero(self, k):
        """True when M^k vanishes in the untruncated complex as well."""
        if self.lo <= k <= self.hi:
            return self.dim(k) == 0
        if k < self.lo:
            return not self.is_open("lo")
        return not self.is_open("hi")

    def homology(self, k):
        if k not in self._homology:
            self._homology[k] = homology(
                self.dim(k), self.b_at(k - 1), self.b_at(k), k, self.field
            )
        return self._homology[k]

    def homology_result(self):
        result = HomologyResult(self.name, "hochschild")
        for k in self.space.degrees():
            result.entries[k] = self.homology(k)
        return result

    def induced_B(self, k):
        return induced_map(self.B_at(k), self.homology(k), self.homology(k - 1), self.field)

    def describe(self):
        return {
            "name": self.name,
            "orientation": self.orientation,
            "window": [self.lo, self.hi],
            "ends": dict(self.ends),
            "dims": {str(k): self.dim(k) for k in self.space.degrees()},
        }


def truncate(field_spec, raw_dims, raw_b, raw_B, lo, hi, open_low=False, open_high=False,
             orientation="cochain", name=""):
    """Cut the window [lo, hi] out of raw mixed-complex data.

    ``raw_b[k]`` maps degree k to k+1 and ``raw_B[k]`` degree k to k-1;
    an open end needs the raw degree just outside it.
    """
    low_cut = open_low and raw_dims.get(lo - 1, 0) > 0
    high_cut = open_high and raw_dims.get(hi + 1, 0) > 0
    dims, transports = {}, {}
    for k in range(lo, hi + 1):
        n = raw_dims.get(k, 0)
        cut_here = (k == lo and low_cut) or (k == hi and high_cut)
        if not cut_here or n == 0:
            dims[k] = n
            continue
        cycles = kernel_basis(raw_b[hi], field_spec) if (k == hi and high_cut) else Subspace.full(n)
        bounds = image_basis(raw_b[lo - 1], field_spec) if (k == lo and low_cut) else Subspace.zero(n)
        sq = subquotient(cycles, bounds, field_spec)
        dims[k] = sq.dim
        transports[k] = (sq.projection, sq.section)
        logger.debug(f"{name}: degree {k} cut from {n} to {sq.dim}")

    def into(k):
        return transports[k][0] if k in transports else np.eye(dims[k], dtype=object)

    def out_of(k):
        return transports[k][1] if k in transports else np.eye(dims[k], dtype=object)

    b = {k: field_spec.reduce(mat(into(k + 1), mat(raw_b[k], out_of(k)))) for k in range(lo, hi)}
    B = {k: field_spec.reduce(mat(into(k - 1), mat(raw_B[k], out_of(k)))) for k in range(lo + 1, hi + 1)}
    ends = {
        "lo": END_OPEN if low_cut else END_CLOSED,
        "hi": END_OPEN if high_cut else END_CLOSED,
    }
    mc = MixedComplex(
        field=field_spec,
        space=GradedSpace(lo, hi, dims),
        b=b,
        B=B,
        orientation=orientation,
        ends=ends,
        transports=transports,
        raw_dims={k: raw_dims.get(k, 0) for k in range(lo, hi + 1)},
        name=name,
    )
    _seal(mc)
    return mc


def _seal(mc):
    """An open end whose two nearest homology groups vanish is treated as closed."""
    if mc.hi - mc.lo < 1:
        return
    if mc.is_open("lo") and mc.homology(mc.lo).dim == 0 and mc.homology(mc.lo + 1).dim == 0:
        mc.ends["lo"] = END_SEALED
        logger.info(f"{mc.name}: low end sealed")
    if mc.is_open("hi") and mc.homology(mc.hi).dim == 0 and mc.homology(mc.hi - 1).dim == 0:
        mc.ends["hi"] = END_SEALED
        logger.info(f"{mc.name}: high end sealed")


def from_chains(field_spec, top, dims, b, B, offset=0, name=""):
    """Regrade chain data N(0..top+1) to cochains M^k := N(offset - k).

    ``b[n]``: N(n) -> N(n-1), ``B[n]``: N(n) -> N(n+1); degree top+1 is
    the look-ahead degree for the open end.
    """
    raw_dims = {offset - n: dims[n] for n in range(0, top + 2)}
    raw_b = {offset - n: b[n] for n in range(1, top + 2)}
    raw_B = {offset - n: B[n] for n in range(0, top + 1)}
    return truncate(field_spec, raw_dims, raw_b, raw_B, offset - top, offset,
                    open_low=True, open_high=False, orientation="chain", name=name)


def validate_mixed(mc):
    report = ValidationReport(f"mixed complex {mc.name}")
    f = mc.field
    for k in mc.space.degrees():
        report.add("b^2", f.is_zero(mat(mc.b_at(k + 1), mc.b_at(k))), degree=k)
        report.add("B^2", f.is_zero(mat(mc.B_at(k - 1), mc.B_at(k))), degree=k)
        bracket = mat(mc.B_at(k + 1), mc.b_at(k)) + mat(mc.b_at(k - 1), mc.B_at(k))
        report.add("[B,b]", f.is_zero(bracket), degree=k)
    return report


class UWindowComplex:
    """CC, CC_- or CC_per of a mixed complex on a total-degree window.

    Total degree n collects pairs (i, j) with i + 2j = n, i inside the
    mixed window and j >= 0 (cyclic), j <= 0 (negative) or any j (periodic).
    """

    def __init__(self, mixed, variant, margin=2):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        self.mixed = mixed
        self.variant = variant
        self.field = mixed.field
        self.n_lo = mixed.lo - margin
        self.n_hi = mixed.hi + margin
        self._layouts = {}
        self._d = {}
        self._homology = {}

    def j_allowed(self, j):
        if self.variant == CYCLIC:
            return j >= 0
        if self.variant == NEGATIVE:
            return j <= 0
        return True

    def layout(self, n):
        """Ordered pairs at total degree n with their column offsets."""
        if n not in self._layouts:
            mc = self.mixed
            pairs, offsets, pos = [], {}, 0
            j_lo = -((mc.hi - n) // 2)
            j_hi = (n - mc.lo) // 2
            for j in range(j_lo, j_hi + 1):
                i = n - 2 * j
                if not self.j_allowed(j) or i < mc.lo or i > mc.hi:
                    continue
                pairs.append((i, j))
                offsets[(i, j)] = pos
                pos += mc.dim(i)
            self._layouts[n] = (pairs, offsets, pos)
        return self._layouts[n]

    def dim(self, n):
        return self.layout(n)[2]

    def block_operator(self, n, shift, blocks):
        """Matrix CC^n -> CC^(n+shift) assembled from M-blocks.

        ``blocks`` lists (di, dj, getter) with getter(i) returning the
        M^i -> M^(i+di) matrix; targets outside the layout are dropped.
        """
        pairs, offsets, size = self.layout(n)
        _, t_offsets, t_size = self.layout(n + shift)
        out = np.zeros((t_size, size), dtype=object)
        for (i, j) in pairs:
            src = offsets[(i, j)]
            w = self.mixed.dim(i)
            for di, dj, getter in blocks:
                key = (i + di, j + dj)
                if key not in t_offsets or w == 0:
                    continue
                block = getter(i)
                if block is None:
                    continue
                h = self.mixed.dim(i + di)
                dst = t_offsets[key]
                out[dst:dst + h, src:src + w] += block
        return self.field.reduce(out)

    def differential(self, n):
        if n not in self._d:
            self._d[n] = self.block_operator(
                n, 1, [(1, 0, self.mixed.b_at), (-1, 1, self.mixed.B_at)]
            )
        return self._d[n]

    def u_shift(self, n):
        """Multiplication by u: CC^n -> CC^(n+2)."""
        eye = lambda i: np.eye(self.mixed.dim(i), dtype=object)
        return self.block_operator(n, 2, [(0, 1, eye)])

    def embed(self, n, j):
        """Inclusion of M^(n-2j) as the u^j component of CC^n."""
        i = n - 2 * j
        _, offsets, size = self.layout(n)
        out = np.zeros((size, self.mixed.dim(i)), dtype=object)
        if (i, j) in offsets:
            start = offsets[(i, j)]
            out[start:start + self.mixed.dim(i), :] = np.eye(self.mixed.dim(i), dtype=object)
        return out

    def component(self, n, j):
        """Projection of CC^n onto its u^j component."""
        return self.embed(n, j).T.copy()

    def trusted(self, n):
        mc = self.mixed
        lo_open, hi_open = mc.is_open("lo"), mc.is_open("hi")
        for m in (n - 1, n, n + 1):
            if self.variant == CYCLIC:
                if lo_open or (hi_open and m >= mc.hi):
                    return False
            elif self.variant == NEGATIVE:
                if hi_open or (lo_open and m <= mc.lo):
                    return False
            elif lo_open or hi_open:
                return False
        return True

    def validate(self):
        report = ValidationReport(f"{self.variant} complex of {self.mixed.name}")
        for n in range(self.n_lo, self.n_hi + 1):
            square = mat(self.differential(n + 1), self.differential(n))
            report.add("d_u^2", self.field.is_zero(square), degree=n)
        return report

    def homology(self, n):
        if n not in self._homology:
            self._homology[n] = homology(
                self.dim(n), self.differential(n - 1), self.differential(n), n,
                self.field, trusted=self.trusted(n),
            )
        return self._homology[n]

    def homology_result(self, degrees=None):
        result = HomologyResult(self.mixed.name, self.variant)
        for n in degrees if degrees is not None else range(self.n_lo, self.n_hi + 1):
            result.entries[n] = self.homology(n)
        return result

    def require_trusted(self, *degrees):
        for n in degrees:
            if not self.trusted(n):
                raise UntrustedDegree(f"{self.variant} degree {n} touches a cut end", degree=n)

    def euler_check(self):
        report = ValidationReport(f"euler {self.variant} {self.mixed.name}")
        for n in range(self.n_lo, self.n_hi + 1):
            if not self.trusted(n):
                continue
            expected = (self.dim(n) - rank(self.differential(n), self.field)
                        - rank(self.differential(n - 1), self.field))
            report.add("euler", expected == self.homology(n).dim, degree=n)
        return report


def build_u_complex(mc, variant, margin=2):
    return UWindowComplex(mc, variant, margin)


@dataclass
class SBIMaps:
    variant: str
    S: Dict[int, np.ndarray] = field(default_factory=dict)
    pi: Dict[int, np.ndarray] = field(default_factory=dict)
    beta: Dict[int, np.ndarray] = field(default_factory=dict)
    j: Dict[int, np.ndarray] = field(default_factory=dict)
    induced_B: Dict[int, np.ndarray] = field(default_factory=dict)
    checks: Optional[ValidationReport] = None

    def get(self, name, n):
        table = getattr(self, name)
        if n not in table:
            raise UntrustedDegree(f"{name} is not available at degree {n}", degree=n)
        return table[n]


def sbi_maps(cc):
    """S, pi, beta (cyclic) or j, S, beta (negative) on trusted degrees, with contracts."""
    mc, f = cc.mixed, cc.field
    maps = SBIMaps(cc.variant, checks=ValidationReport(f"SBI {cc.variant} {mc.name}"))
    degrees = range(cc.n_lo, cc.n_hi + 1)
    for n in range(mc.lo - 1, mc.hi + 2):
        maps.induced_B[n] = mc.induced_B(n)
    if cc.variant == CYCLIC:
        for n in degrees:
            if cc.trusted(n) and cc.trusted(n - 2):
                maps.S[n] = induced_map(cc.u_shift(n - 2), cc.homology(n - 2), cc.homology(n), f)
            if cc.trusted(n):
                maps.pi[n] = induced_map(cc.component(n, 0), cc.homology(n), mc.homology(n), f)
            if cc.trusted(n - 1):
                lift = mat(cc.embed(n - 1, 0), mc.B_at(n))
                maps.beta[n] = induced_map(lift, mc.homology(n), cc.homology(n - 1), f)
        for n in degrees:
            if n in maps.pi and n in maps.S:
                maps.checks.add("pi.S", f.is_zero(mat(maps.pi[n], maps.S[n])), degree=n)
            if n in maps.beta and n in maps.pi:
                maps.checks.add("beta.pi", f.is_zero(mat(maps.beta[n], maps.pi[n])), degree=n)
            if n in maps.beta and (n + 1) in maps.S:
                maps.checks.add("S.beta", f.is_zero(mat(maps.S[n + 1], maps.beta[n])), degree=n)
            if n in maps.beta and (n - 1) in maps.pi and n in maps.induced_B:
                composite = mat(maps.pi[n - 1], maps.beta[n])
                maps.checks.add("pi.beta=B", f.equal(composite, maps.induced_B[n]), degree=n)
    elif cc.variant == NEGATIVE:
        for n in degrees:
            if cc.trusted(n):
                maps.j[n] = induced_map(cc.embed(n, 0), mc.homology(n), cc.homology(n), f)
                head = mat(mc.B_at(n), cc.component(n, 0))
                maps.beta[n] = induced_map(head, cc.homology(n), mc.homology(n - 1), f)
            if cc.trusted(n) and cc.trusted(n + 2):
                maps.S[n] = induced_map(cc.u_shift(n), cc.homology(n), cc.homology(n + 2), f)
        for n in degrees:
            if n in maps.S and n in maps.j:
                maps.checks.add("S.j", f.is_zero(mat(maps.S[n], maps.j[n])), degree=n)
            if n in maps.S and (n + 2) in maps.beta:
                maps.checks.add("beta.S", f.is_zero(mat(maps.beta[n + 2], maps.S[n])), degree=n)
            if n in maps.beta and (n - 1) in maps.j:
                maps.checks.add("j.beta", f.is_zero(mat(maps.j[n - 1], maps.beta[n])), degree=n)
            if n in maps.beta and n in maps.j and n in maps.induced_B:
                composite = mat(maps.beta[n], maps.j[n])
                maps.checks.add("beta.j=B", f.equal(composite, maps.induced_B[n]), degree=n)
    else:
        raise ValueError("SBI maps are defined for the cyclic and negative variants")
    logger.info(f"SBI {cc.variant} on {mc.name}: {maps.checks.checked} contracts checked")
    return maps


def stability_check(builder, variant, n_max, n_max_wide, margin=2):
    """Compare trusted dims of the run at n_max with a wider run.

    ``builder(n)`` returns the MixedComplex for truncation bound n.
    """
    narrow_mc, wide_mc = builder(n_max), builder(n_max_wide)
    report = ValidationReport(f"stability {variant} {narrow_mc.name} {n_max}->{n_max_wide}")
    for k in narrow_mc.space.degrees():
        if wide_mc.lo <= k <= wide_mc.hi:
            a, b = narrow_mc.homology(k).dim, wide_mc.homology(k).dim
            report.add("H", a == b, degree=k, dims=[a, b])
    narrow = UWindowComplex(narrow_mc, variant, margin)
    wide = UWindowComplex(wide_mc, variant, margin)
    for n in range(narrow.n_lo, narrow.n_hi + 1):
        if not narrow.trusted(n):
            continue
        a, b = narrow.homology(n).dim, wide.homology(n).dim
        report.add(f"H_{variant}", a == b, degree=n, dims=[a, b])
    return report
