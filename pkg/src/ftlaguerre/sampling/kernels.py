"""Numeric kernels for the samplers: in-repo eigensolvers and the Haar
special-unitary construction.

Everything here works on full batches with plain loops inside, so a
single compilation covers the hot path.  When numba is available (and
FTLAGUERRE_NO_NUMBA is not set) the kernels are compiled with @njit;
otherwise the same functions run as ordinary Python over numpy arrays.
Within either mode results are fully deterministic (and independent of
the worker count); across the two modes they agree to rounding, not to
the bit, because the compiled code may contract multiplies and adds.

Eigenvalues are computed classically: Householder reduction of a real
symmetric matrix to tridiagonal form followed by implicit-shift QL
sweeps, capped at 50 sweeps per eigenvalue.  Complex Hermitian input is
embedded as the real symmetric matrix [[B, -C], [C, B]] (for H = B + iC),
whose spectrum is that of H doubled; adjacent sorted pairs are averaged.
Nothing in the sampling path calls an external eigensolver.

Haar SU(N) draws: Householder QR of a complex Ginibre matrix, the
R-diagonal phase fix that makes the Q factor Haar on U(N), then a global
det^(-1/N) phase computed from an LU determinant.  Eigenphases come from
a mixed Hermitian matrix cos(1) K + sin(1) M, K = (U+U^*)/2 and
M = (U-U^*)/(2i): its eigenvectors are eigenvectors of U away from the
measure-zero degenerate set, each phase is read off the two quadratic
forms, and the reconstruction is accepted only if sum_j e^{i theta_j}
reproduces Tr U to 1e-8 (otherwise the draw is flagged for redraw).
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "NUMBA_ENABLED",
    "MAX_SWEEPS",
    "eig_tridiag_batch",
    "eig_herm_batch",
    "sun_phase_batch",
]

_EPS = 2.220446049250313e-16
MAX_SWEEPS = 50
_MIX_C = math.cos(1.0)
_MIX_S = math.sin(1.0)


def _numba_wanted() -> bool:
    if os.environ.get("FTLAGUERRE_NO_NUMBA", "").strip().lower() in (
        "1",
        "true",
        "yes",
    ):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_wanted()

if NUMBA_ENABLED:
    from numba import njit as _njit

    def _jit(fn):
        return _njit(cache=True, nogil=True)(fn)

else:

    def _jit(fn):
        return fn


def _sort_values(d):
    for i in range(1, d.shape[0]):
        key = d[i]
        j = i - 1
        while j >= 0 and d[j] > key:
            d[j + 1] = d[j]
            j -= 1
        d[j + 1] = key


def _sort_pairs(d, z):
    # ascending selection sort carrying matrix columns along
    n = d.shape[0]
    for i in range(n - 1):
        k = i
        for j in range(i + 1, n):
            if d[j] < d[k]:
                k = j
        if k != i:
            tmp = d[i]
            d[i] = d[k]
            d[k] = tmp
            for r in range(z.shape[0]):
                t = z[r, i]
                z[r, i] = z[r, k]
                z[r, k] = t


def _tred2(z, d, e, want_vectors):
    # Householder reduction of the real symmetric matrix z to tridiagonal
    # form; diagonal to d, subdiagonal to e[0:n-1] (stored at 0..n-2 via
    # the caller's convention below), transformation accumulated in z
    # when requested.
    n = z.shape[0]
    for i in range(n - 1, 0, -1):
        l = i - 1
        h = 0.0
        scale = 0.0
        if l > 0:
            for k in range(l + 1):
                scale += abs(z[i, k])
            if scale == 0.0:
                e[i] = z[i, l]
            else:
                for k in range(l + 1):
                    z[i, k] /= scale
                    h += z[i, k] * z[i, k]
                f = z[i, l]
                g = -math.sqrt(h) if f >= 0.0 else math.sqrt(h)
                e[i] = scale * g
                h -= f * g
                z[i, l] = f - g
                f = 0.0
                for j in range(l + 1):
                    if want_vectors:
                        z[j, i] = z[i, j] / h
                    g = 0.0
                    for k in range(j + 1):
                        g += z[j, k] * z[i, k]
                    for k in range(j + 1, l + 1):
                        g += z[k, j] * z[i, k]
                    e[j] = g / h
                    f += e[j] * z[i, j]
                hh = f / (h + h)
                for j in range(l + 1):
                    f = z[i, j]
                    g = e[j] - hh * f
                    e[j] = g
                    for k in range(j + 1):
                        z[j, k] -= f * e[k] + g * z[i, k]
        else:
            e[i] = z[i, l]
        d[i] = h
    d[0] = 0.0
    e[0] = 0.0
    if want_vectors:
        for i in range(n):
            if d[i] != 0.0:
                for j in range(i):
                    g = 0.0
                    for k in range(i):
                        g += z[i, k] * z[k, j]
                    for k in range(i):
                        z[k, j] -= g * z[k, i]
            d[i] = z[i, i]
            z[i, i] = 1.0
            for j in range(i):
                z[j, i] = 0.0
                z[i, j] = 0.0
    else:
        for i in range(n):
            d[i] = z[i, i]
    # move the subdiagonal to positions 0..n-2
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0


def _tql(d, e, z, want_vectors):
    # implicit-shift QL on a symmetric tridiagonal matrix: diagonal d,
    # subdiagonal e[0..n-2] (e[n-1] slack, destroyed).  Returns 0 on
    # success, 1 if any eigenvalue failed to converge in MAX_SWEEPS.
    n = d.shape[0]
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > MAX_SWEEPS:
                return 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            sg = r if g >= 0.0 else -r
            g = d[m] - d[l] + e[l] / (g + sg)
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want_vectors:
                    for k in range(z.shape[0]):
                        f = z[k, i + 1]
                        z[k, i + 1] = s * z[k, i] + c * f
                        z[k, i] = c * z[k, i] - s * f
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def _embed_hermitian(H, A):
    # real symmetric 2n x 2n embedding [[B, -C], [C, B]] of H = B + iC
    n = H.shape[0]
    for i in range(n):
        for j in range(n):
            br = H[i, j].real
            bi = H[i, j].imag
            A[i, j] = br
            A[i, j + n] = -bi
            A[i + n, j] = bi
            A[i + n, j + n] = br


def _eig_tridiag_batch(diag, off):
    nb = diag.shape[0]
    n = diag.shape[1]
    w = np.empty((nb, n))
    status = np.zeros(nb, dtype=np.int8)
    e = np.empty(n)
    dummy = np.empty((1, 1))
    for b in range(nb):
        for i in range(n):
            w[b, i] = diag[b, i]
        for i in range(n - 1):
            e[i] = off[b, i]
        e[n - 1] = 0.0
        if _tql(w[b], e, dummy, False) != 0:
            status[b] = 1
        else:
            _sort_values(w[b])
    return w, status


def _eig_herm_batch(H):
    nb = H.shape[0]
    n = H.shape[1]
    m = 2 * n
    w = np.empty((nb, n))
    status = np.zeros(nb, dtype=np.int8)
    A = np.empty((m, m))
    d = np.empty(m)
    e = np.empty(m)
    for b in range(nb):
        _embed_hermitian(H[b], A)
        _tred2(A, d, e, False)
        if _tql(d, e, A, False) != 0:
            status[b] = 1
            continue
        _sort_values(d)
        for j in range(n):
            w[b, j] = 0.5 * (d[2 * j] + d[2 * j + 1])
    return w, status


def _lu_det(A):
    # determinant by partially pivoted LU; A is destroyed
    n = A.shape[0]
    det = 1.0 + 0.0j
    sign = 1.0
    for k in range(n):
        p = k
        best = abs(A[k, k])
        for i in range(k + 1, n):
            v = abs(A[i, k])
            if v > best:
                best = v
                p = i
        if best == 0.0:
            return 0.0 + 0.0j
        if p != k:
            for j in range(n):
                t = A[k, j]
                A[k, j] = A[p, j]
                A[p, j] = t
            sign = -sign
        piv = A[k, k]
        det *= piv
        for i in range(k + 1, n):
            f = A[i, k] / piv
            for j in range(k + 1, n):
                A[i, j] -= f * A[k, j]
    return det * sign


def _haar_su_inplace(R, Q, v, work):
    # QR with column-phase fix and global det^{-1/N} phase; the special
    # unitary matrix is written into Q.  Returns 0 on success, 1 on a
    # degenerate QR column, 2 if the final determinant misses 1.
    n = R.shape[0]
    for i in range(n):
        for j in range(n):
            Q[i, j] = 1.0 + 0.0j if i == j else 0.0 + 0.0j
    for k in range(n):
        nrm2 = 0.0
        for i in range(k, n):
            zz = R[i, k]
            nrm2 += zz.real * zz.real + zz.imag * zz.imag
        nrm = math.sqrt(nrm2)
        if nrm < 1e-280:
            return 1
        x0 = R[k, k]
        ax0 = abs(x0)
        ph = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        alpha = -ph * nrm
        vn2 = 0.0
        for i in range(k, n):
            vi = R[i, k] - alpha if i == k else R[i, k]
            v[i] = vi
            vn2 += vi.real * vi.real + vi.imag * vi.imag
        fac = 2.0 / vn2
        for j in range(k, n):
            s = 0.0 + 0.0j
            for i in range(k, n):
                s += v[i].conjugate() * R[i, j]
            s *= fac
            for i in range(k, n):
                R[i, j] -= s * v[i]
        for i in range(n):
            s = 0.0 + 0.0j
            for j in range(k, n):
                s += Q[i, j] * v[j]
            s *= fac
            for j in range(k, n):
                Q[i, j] -= s * v[j].conjugate()
    for j in range(n):
        r = R[j, j]
        ar = abs(r)
        if ar < 1e-280:
            return 1
        ph = r / ar
        for i in range(n):
            Q[i, j] *= ph
    for i in range(n):
        for j in range(n):
            work[i, j] = Q[i, j]
    det = _lu_det(work)
    phi = math.atan2(det.imag, det.real)
    rot = complex(math.cos(-phi / n), math.sin(-phi / n))
    for i in range(n):
        for j in range(n):
            Q[i, j] *= rot
    for i in range(n):
        for j in range(n):
            work[i, j] = Q[i, j]
    det = _lu_det(work)
    if math.hypot(det.real - 1.0, det.imag) > 1e-10:
        return 2
    return 0


def _phases_from_su(U, K, M, A, d, e, out):
    # eigenphases of the special unitary U via the mixed Hermitian matrix
    # cos(1) K + sin(1) M; returns 0 ok, 1 eigensolver failure, 2 when the
    # reconstructed trace misses Tr U (degenerate mixing -> redraw).
    n = U.shape[0]
    for i in range(n):
        for j in range(n):
            uij = U[i, j]
            uji = U[j, i].conjugate()
            K[i, j] = 0.5 * (uij + uji)
            M[i, j] = complex(0.0, -0.5) * (uij - uji)
    m = 2 * n
    for i in range(n):
        for j in range(n):
            h = _MIX_C * K[i, j] + _MIX_S * M[i, j]
            A[i, j] = h.real
            A[i, j + n] = -h.imag
            A[i + n, j] = h.imag
            A[i + n, j + n] = h.real
    _tred2(A, d, e, True)
    if _tql(d, e, A, True) != 0:
        return 1
    _sort_pairs(d, A)
    for jj in range(n):
        col = 2 * jj
        kq = 0.0
        mq = 0.0
        for i in range(n):
            zi = complex(A[i, col], A[i + n, col])
            ks = 0.0 + 0.0j
            ms = 0.0 + 0.0j
            for j in range(n):
                zj = complex(A[j, col], A[j + n, col])
                ks += K[i, j] * zj
                ms += M[i, j] * zj
            kq += (zi.conjugate() * ks).real
            mq += (zi.conjugate() * ms).real
        theta = math.atan2(mq, kq)
        if theta <= -math.pi:
            theta = math.pi
        out[jj] = theta
    tr_re = 0.0
    tr_im = 0.0
    for i in range(n):
        tr_re += U[i, i].real
        tr_im += U[i, i].imag
    sc = 0.0
    ss = 0.0
    for j in range(n):
        sc += math.cos(out[j])
        ss += math.sin(out[j])
    if math.hypot(sc - tr_re, ss - tr_im) > 1e-8:
        return 2
    _sort_values(out)
    return 0


def _sun_phase_batch(Z):
    nb = Z.shape[0]
    n = Z.shape[1]
    phases = np.empty((nb, n))
    status = np.zeros(nb, dtype=np.int8)
    Q = np.empty((n, n), dtype=np.complex128)
    R = np.empty((n, n), dtype=np.complex128)
    v = np.empty(n, dtype=np.complex128)
    work = np.empty((n, n), dtype=np.complex128)
    K = np.empty((n, n), dtype=np.complex128)
    M = np.empty((n, n), dtype=np.complex128)
    A = np.empty((2 * n, 2 * n))
    d = np.empty(2 * n)
    e = np.empty(2 * n)
    for b in range(nb):
        for i in range(n):
            for j in range(n):
                R[i, j] = Z[b, i, j]
        st = _haar_su_inplace(R, Q, v, work)
        if st != 0:
            status[b] = st
            continue
        status[b] = _phases_from_su(Q, K, M, A, d, e, phases[b])
    return phases, status


_sort_values = _jit(_sort_values)
_sort_pairs = _jit(_sort_pairs)
_tred2 = _jit(_tred2)
_tql = _jit(_tql)
_embed_hermitian = _jit(_embed_hermitian)
_lu_det = _jit(_lu_det)
_haar_su_inplace = _jit(_haar_su_inplace)
_phases_from_su = _jit(_phases_from_su)

eig_tridiag_batch = _jit(_eig_tridiag_batch)
eig_herm_batch = _jit(_eig_herm_batch)
sun_phase_batch = _jit(_sun_phase_batch)
