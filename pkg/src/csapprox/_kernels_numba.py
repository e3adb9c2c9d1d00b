"""Numba-compiled hot kernels.

Everything in here is numerical inner-loop code: the cyclic Jacobi
eigensolver for Hermitian matrices, simplex projection, the projected
subgradient solver (Bloch-vector fast path for qubits and a general
spectral path), and the brute-force grid oracles.  The pure-numpy
twins live in ``_kernels_numpy`` with identical signatures; the active
set is picked by ``csapprox.backend`` (env var ``CSA_BACKEND``).
"""

import numpy as np
from numba import njit

NAME = "numba"

# Step schedule shared by both backends: c/sqrt(t) for the first
# PHASE1 iterations, then a geometric tail that halts once the step
# drops below STEP_FLOOR.  Must stay in sync with _kernels_numpy.
PHASE1 = 1500
TAIL_EPOCH = 100
TAIL_DECAY = 0.7
STEP_FLOOR = 1e-10


@njit(cache=True, nogil=True)
def eigh_herm(a):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Returns (eigenvalues descending, eigenvector columns, converged).
    Sweep cap 100, off-diagonal threshold 1e-14 relative to the
    Frobenius norm.
    """
    n = a.shape[0]
    A = a.astype(np.complex128).copy()
    V = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += A[i, j].real ** 2 + A[i, j].imag ** 2
    fro = np.sqrt(fro)
    conv = True
    if fro > 0.0 and n > 1:
        tol = 1e-14 * fro
        conv = False
        for _sweep in range(100):
            off = 0.0
            for p in range(n - 1):
                for q in range(p + 1, n):
                    off += A[p, q].real ** 2 + A[p, q].imag ** 2
            if np.sqrt(2.0 * off) <= tol:
                conv = True
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    aab = np.abs(apq)
                    if aab <= 1e-18 * fro:
                        continue
                    app = A[p, p].real
                    aqq = A[q, q].real
                    phase = apq / aab
                    cph = np.conj(phase)
                    tau = (aqq - app) / (2.0 * aab)
                    if tau >= 0.0:
                        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = t * c
                    # A <- A W  (columns p, q of the unitary rotation W)
                    for i in range(n):
                        aip = A[i, p]
                        aiq = A[i, q]
                        A[i, p] = c * aip - s * cph * aiq
                        A[i, q] = s * aip + c * cph * aiq
                    # A <- W^dag A
                    for j in range(n):
                        apj = A[p, j]
                        aqj = A[q, j]
                        A[p, j] = c * apj - s * phase * aqj
                        A[q, j] = s * apj + c * phase * aqj
                    for i in range(n):
                        vip = V[i, p]
                        viq = V[i, q]
                        V[i, p] = c * vip - s * cph * viq
                        V[i, q] = s * vip + c * cph * viq
    w = np.empty(n)
    for i in range(n):
        w[i] = A[i, i].real
    # selection sort, descending; n is small
    for i in range(n - 1):
        mi = i
        for j in range(i + 1, n):
            if w[j] > w[mi]:
                mi = j
        if mi != i:
            tmp = w[i]
            w[i] = w[mi]
            w[mi] = tmp
            for r in range(n):
                tv = V[r, i]
                V[r, i] = V[r, mi]
                V[r, mi] = tv
    return w, V, conv


@njit(cache=True, nogil=True)
def project_simplex(v):
    """Euclidean projection onto the probability simplex (sort-threshold)."""
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = 0.0
    tau = 0.0
    for j in range(n):
        css += u[j]
        t = (css - 1.0) / (j + 1)
        if u[j] > t:
            tau = t
    w = np.empty(n)
    for i in range(n):
        wi = v[i] - tau
        w[i] = wi if wi > 0.0 else 0.0
    return w


@njit(cache=True, nogil=True, inline="always")
def _proj_inplace(v, buf):
    """Allocation-free simplex projection; insertion sort, m is tiny."""
    m = v.shape[0]
    for i in range(m):
        buf[i] = v[i]
    for i in range(1, m):
        key = buf[i]
        j = i - 1
        while j >= 0 and buf[j] < key:
            buf[j + 1] = buf[j]
            j -= 1
        buf[j + 1] = key
    css = 0.0
    tau = 0.0
    for j in range(m):
        css += buf[j]
        t = (css - 1.0) / (j + 1)
        if buf[j] > t:
            tau = t
    for i in range(m):
        w = v[i] - tau
        v[i] = w if w > 0.0 else 0.0


@njit(cache=True, nogil=True, inline="always")
def _bloch_objective(r, b, p):
    dx = r[0]
    dy = r[1]
    dz = r[2]
    for i in range(b.shape[0]):
        dx -= p[i] * b[i, 0]
        dy -= p[i] * b[i, 1]
        dz -= p[i] * b[i, 2]
    return np.sqrt(dx * dx + dy * dy + dz * dz)


@njit(cache=True, nogil=True)
def solve_bloch(r, b, starts, c0, max_iter):
    """Projected subgradient descent for qubit targets in Bloch form.

    Objective |r - b^T p| over the simplex (exact trace-norm distance
    for unit-trace qubit operators).  One run per start; best iterate
    wins, ties to the earlier start.
    """
    m = b.shape[0]
    ns = starts.shape[0]
    best_f = 1e300
    best_p = np.zeros(m)
    total = 0
    p = np.empty(m)
    buf = np.empty(m)
    avg = np.empty(m)
    for s in range(ns):
        for i in range(m):
            p[i] = starts[s, i]
            avg[i] = 0.0
        _proj_inplace(p, buf)
        t = 0
        alpha = c0
        kprev = -1
        while t < max_iter:
            t += 1
            dx = r[0]
            dy = r[1]
            dz = r[2]
            for i in range(m):
                dx -= p[i] * b[i, 0]
                dy -= p[i] * b[i, 1]
                dz -= p[i] * b[i, 2]
            f = np.sqrt(dx * dx + dy * dy + dz * dz)
            if f < best_f:
                best_f = f
                for i in range(m):
                    best_p[i] = p[i]
            if f < 1e-15:
                break
            if t <= PHASE1:
                alpha = c0 / np.sqrt(t)
                for i in range(m):
                    avg[i] += p[i]
            else:
                k = (t - PHASE1 - 1) // TAIL_EPOCH + 1
                if k != kprev:
                    alpha = (c0 / np.sqrt(PHASE1)) * TAIL_DECAY ** k
                    kprev = k
                if alpha < STEP_FLOOR:
                    break
            inv = alpha / f
            for i in range(m):
                p[i] += (dx * b[i, 0] + dy * b[i, 1] + dz * b[i, 2]) * inv
            _proj_inplace(p, buf)
            if t == PHASE1:
                # Polyak average of the first phase as an extra candidate
                q = project_simplex(avg / PHASE1)
                fq = _bloch_objective(r, b, q)
                if fq < best_f:
                    best_f = fq
                    for i in range(m):
                        best_p[i] = q[i]
        total += t
    return best_f, best_p, total


@njit(cache=True, nogil=True)
def solve_bloch_batch(R, b, starts, c0, max_iter):
    n = R.shape[0]
    m = b.shape[0]
    F = np.empty(n)
    P = np.empty((n, m))
    IT = np.empty(n, dtype=np.int64)
    for i in range(n):
        f, p, it = solve_bloch(R[i], b, starts, c0, max_iter)
        F[i] = f
        for j in range(m):
            P[i, j] = p[j]
        IT[i] = it
    return F, P, IT


@njit(cache=True, nogil=True)
def _tracenorm_sign(A, sign_tol):
    """Trace norm of Hermitian A and its sign operator sum_j sgn(l_j) P_j."""
    w, V, _ = eigh_herm(A)
    n = A.shape[0]
    f = 0.0
    S = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        f += abs(w[j])
        if w[j] > sign_tol:
            sg = 1.0
        elif w[j] < -sign_tol:
            sg = -1.0
        else:
            continue
        for a in range(n):
            va = V[a, j]
            for c in range(n):
                S[a, c] += sg * va * np.conj(V[c, j])
    return f, S


@njit(cache=True, nogil=True)
def solve_general(Rho, N, starts, c0, max_iter):
    """Projected subgradient descent on ||Rho - sum_i p_i N_i||_1."""
    m = N.shape[0]
    d = Rho.shape[0]
    ns = starts.shape[0]
    best_f = 1e300
    best_p = np.zeros(m)
    total = 0
    g = np.empty(m)
    A = np.empty((d, d), dtype=np.complex128)
    for s in range(ns):
        p = project_simplex(starts[s])
        avg = np.zeros(m)
        t = 0
        while t < max_iter:
            t += 1
            for a in range(d):
                for c in range(d):
                    acc = Rho[a, c]
                    for i in range(m):
                        acc -= p[i] * N[i, a, c]
                    A[a, c] = acc
            f, S = _tracenorm_sign(A, 1e-12)
            if f < best_f:
                best_f = f
                for i in range(m):
                    best_p[i] = p[i]
            if f < 1e-15:
                break
            for i in range(m):
                acc2 = 0.0
                for a in range(d):
                    for c in range(d):
                        acc2 += (S[c, a] * N[i, a, c]).real
                g[i] = -acc2
            if t <= PHASE1:
                alpha = c0 / np.sqrt(t)
                for i in range(m):
                    avg[i] += p[i]
            else:
                k = (t - PHASE1 - 1) // TAIL_EPOCH + 1
                alpha = (c0 / np.sqrt(PHASE1)) * TAIL_DECAY ** k
                if alpha < STEP_FLOOR:
                    break
            pn = np.empty(m)
            for i in range(m):
                pn[i] = p[i] - alpha * g[i]
            p = project_simplex(pn)
            if t == PHASE1:
                q = project_simplex(avg / PHASE1)
                for a in range(d):
                    for c in range(d):
                        acc = Rho[a, c]
                        for i in range(m):
                            acc -= q[i] * N[i, a, c]
                        A[a, c] = acc
                fq, _ = _tracenorm_sign(A, 1e-12)
                if fq < best_f:
                    best_f = fq
                    for i in range(m):
                        best_p[i] = q[i]
        total += t
    return best_f, best_p, total


@njit(cache=True, nogil=True)
def pairwise_descent_bloch(r, b, w, f, step):
    """Greedy mass transfers of size `step` between weight pairs."""
    m = b.shape[0]
    improved = True
    guard = 0
    while improved and guard < 100000:
        improved = False
        for i in range(m):
            if w[i] < step - 1e-15:
                continue
            for j in range(m):
                if j == i:
                    continue
                w[i] -= step
                w[j] += step
                fn = _bloch_objective(r, b, w)
                if fn < f - 1e-15:
                    f = fn
                    improved = True
                    guard += 1
                    if w[i] < step - 1e-15:
                        break
                else:
                    w[i] += step
                    w[j] -= step
    return f, w


@njit(cache=True, nogil=True)
def oracle_bloch_pairs(r, u, res):
    """Exhaustive grid search for a set made of antipodal Bloch pairs.

    For such sets the mixture Bloch vector depends only on the weight
    differences xi_l = (c+_l - c-_l)/res, so the full composition grid
    collapses to the integer lattice sum|xi| <= res with the parity of
    res.  u holds one unit axis per pair (at most 3 pairs for qubits).
    """
    npairs = u.shape[0]
    h = 1.0 / res
    best_f = 1e300
    bx = 0
    by = 0
    bz = 0
    if npairs == 1:
        for x in range(-res, res + 1):
            if (res - abs(x)) % 2 != 0:
                continue
            dx = r[0] - h * x * u[0, 0]
            dy = r[1] - h * x * u[0, 1]
            dz = r[2] - h * x * u[0, 2]
            f = np.sqrt(dx * dx + dy * dy + dz * dz)
            if f < best_f:
                best_f = f
                bx = x
    elif npairs == 2:
        for x in range(-res, res + 1):
            rem1 = res - abs(x)
            px = r[0] - h * x * u[0, 0]
            py = r[1] - h * x * u[0, 1]
            pz = r[2] - h * x * u[0, 2]
            if np.sqrt(px * px + py * py + pz * pz) - rem1 * h >= best_f:
                continue
            for y in range(-rem1, rem1 + 1):
                if (rem1 - abs(y)) % 2 != 0:
                    continue
                dx = px - h * y * u[1, 0]
                dy = py - h * y * u[1, 1]
                dz = pz - h * y * u[1, 2]
                f = np.sqrt(dx * dx + dy * dy + dz * dz)
                if f < best_f:
                    best_f = f
                    bx = x
                    by = y
    else:
        for x in range(-res, res + 1):
            rem1 = res - abs(x)
            px = r[0] - h * x * u[0, 0]
            py = r[1] - h * x * u[0, 1]
            pz = r[2] - h * x * u[0, 2]
            if np.sqrt(px * px + py * py + pz * pz) - rem1 * h >= best_f:
                continue
            for y in range(-rem1, rem1 + 1):
                rem2 = rem1 - abs(y)
                qx = px - h * y * u[1, 0]
                qy = py - h * y * u[1, 1]
                qz = pz - h * y * u[1, 2]
                if np.sqrt(qx * qx + qy * qy + qz * qz) - rem2 * h >= best_f:
                    continue
                for z in range(-rem2, rem2 + 1):
                    if (rem2 - abs(z)) % 2 != 0:
                        continue
                    dx = qx - h * z * u[2, 0]
                    dy = qy - h * z * u[2, 1]
                    dz = qz - h * z * u[2, 2]
                    f = np.sqrt(dx * dx + dy * dy + dz * dz)
                    if f < best_f:
                        best_f = f
                        bx = x
                        by = y
                        bz = z
    out = np.empty(3, dtype=np.int64)
    out[0] = bx
    out[1] = by
    out[2] = bz
    return best_f, out


@njit(cache=True, nogil=True)
def oracle_bloch_generic(r, b, res, f0, w0):
    """Depth-first composition enumeration with ball-bound pruning.

    Visits every weight vector on the simplex grid with spacing 1/res;
    a subtree is cut when even the closest point of the reachable ball
    cannot beat the incumbent (|b_i| <= 1 for density matrices).
    (f0, w0) seed the incumbent and must be grid-feasible.
    """
    m = b.shape[0]
    h = 1.0 / res
    best_f = f0
    best_c = np.empty(m, dtype=np.int64)
    for i in range(m):
        best_c[i] = int(round(w0[i] * res))
    c = np.zeros(m, dtype=np.int64)
    rem = np.zeros(m, dtype=np.int64)
    # partial residual vectors per level
    pv = np.zeros((m, 3))
    pv[0, 0] = r[0]
    pv[0, 1] = r[1]
    pv[0, 2] = r[2]
    rem[0] = res
    j = 0
    c[0] = -1
    while True:
        c[j] += 1
        if c[j] > rem[j]:
            j -= 1
            if j < 0:
                break
            continue
        dx = pv[j, 0] - c[j] * h * b[j, 0]
        dy = pv[j, 1] - c[j] * h * b[j, 1]
        dz = pv[j, 2] - c[j] * h * b[j, 2]
        rm = rem[j] - c[j]
        if j == m - 2:
            ex = dx - rm * h * b[m - 1, 0]
            ey = dy - rm * h * b[m - 1, 1]
            ez = dz - rm * h * b[m - 1, 2]
            f = np.sqrt(ex * ex + ey * ey + ez * ez)
            if f < best_f:
                best_f = f
                for i in range(m - 1):
                    best_c[i] = c[i]
                best_c[m - 1] = rm
        else:
            if np.sqrt(dx * dx + dy * dy + dz * dz) - rm * h >= best_f:
                continue
            j += 1
            pv[j, 0] = dx
            pv[j, 1] = dy
            pv[j, 2] = dz
            rem[j] = rm
            c[j] = -1
    w = np.empty(m)
    for i in range(m):
        w[i] = best_c[i] * h
    return best_f, w


@njit(cache=True, nogil=True)
def _tracenorm_only(A):
    w, _, _ = eigh_herm(A)
    f = 0.0
    for j in range(w.shape[0]):
        f += abs(w[j])
    return f


@njit(cache=True, nogil=True)
def oracle_general(Rho, N, res):
    """Exhaustive simplex-grid search for arbitrary-dimension sets."""
    m = N.shape[0]
    d = Rho.shape[0]
    h = 1.0 / res
    best_f = 1e300
    best_c = np.zeros(m, dtype=np.int64)
    best_c[0] = res
    c = np.zeros(m, dtype=np.int64)
    rem = np.zeros(m, dtype=np.int64)
    pv = np.zeros((m, d, d), dtype=np.complex128)
    for a in range(d):
        for e in range(d):
            pv[0, a, e] = Rho[a, e]
    rem[0] = res
    j = 0
    c[0] = -1
    A = np.empty((d, d), dtype=np.complex128)
    while True:
        c[j] += 1
        if c[j] > rem[j]:
            j -= 1
            if j < 0:
                break
            continue
        rm = rem[j] - c[j]
        if j == m - 2:
            for a in range(d):
                for e in range(d):
                    A[a, e] = (pv[j, a, e] - c[j] * h * N[j, a, e]
                               - rm * h * N[m - 1, a, e])
            f = _tracenorm_only(A)
            if f < best_f:
                best_f = f
                for i in range(m - 1):
                    best_c[i] = c[i]
                best_c[m - 1] = rm
        else:
            for a in range(d):
                for e in range(d):
                    A[a, e] = pv[j, a, e] - c[j] * h * N[j, a, e]
            if _tracenorm_only(A) - rm * h >= best_f:
                continue
            jn = j + 1
            for a in range(d):
                for e in range(d):
                    pv[jn, a, e] = A[a, e]
            rem[jn] = rm
            j = jn
            c[j] = -1
    w = np.empty(m)
    for i in range(m):
        w[i] = best_c[i] * h
    return best_f, w


@njit(cache=True, nogil=True)
def pairwise_descent_general(Rho, N, w, f, step):
    m = N.shape[0]
    d = Rho.shape[0]
    A = np.empty((d, d), dtype=np.complex128)
    improved = True
    guard = 0
    while improved and guard < 100000:
        improved = False
        for i in range(m):
            if w[i] < step - 1e-15:
                continue
            for j in range(m):
                if j == i:
                    continue
                w[i] -= step
                w[j] += step
                for a in range(d):
                    for e in range(d):
                        acc = Rho[a, e]
                        for l in range(m):
                            acc -= w[l] * N[l, a, e]
                        A[a, e] = acc
                fn = _tracenorm_only(A)
                if fn < f - 1e-15:
                    f = fn
                    improved = True
                    guard += 1
                    if w[i] < step - 1e-15:
                        break
                else:
                    w[i] += step
                    w[j] -= step
    return f, w
